 def num_sym_points(sv):
    count = 0
    for v in sv:
        if v <= 0:
            count += 1

    return count
