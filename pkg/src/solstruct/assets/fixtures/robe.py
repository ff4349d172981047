def solution():
    # <reason>The robe takes 2 bolts of blue fiber.</reason>
    blue_fiber_bolts = 2 # 2
    # <reason>The white fiber needed is half of the blue fiber, so it takes 2/2=<<2/2=1>>1 bolt of white fiber.</reason>
    white_fiber_bolts = blue_fiber_bolts / 2 # 1.0
    # <reason>The total amount of fabric needed is 2+1=<<2+1=3>>3 bolts.</reason>
    total_bolts = blue_fiber_bolts + white_fiber_bolts # 3.0
    # <reason>The result is 3 bolts in total.</reason>
    result = total_bolts # 3.0
    return result
