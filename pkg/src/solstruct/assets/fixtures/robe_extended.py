def solution():
    # <reason>The basic robe design starts with 2 bolts of blue fiber.</reason>
    blue_fiber_bolts = 2  # 2
    # <reason>First, the design is made 5 times larger, requiring 2 * 5 = 10 bolts of blue fiber.</reason>
    larger_design_bolts = blue_fiber_bolts * 5  # 10
    # <reason>Due to the celestial event, the design must be made 9 times more intricate.</reason>
    op_var = 9  # 9
    # <reason>The intricate design requires 10 * 9 = 90 bolts of blue fiber.</reason>
    extra_var = larger_design_bolts * op_var  # 90
    # <reason>Then, for the festival version, we need 6 times as much blue fiber as the intricate design, so 90 * 6 = 540 bolts of blue fiber.</reason>
    festival_blue_fiber_bolts = extra_var * 6  # 540
    # <reason>The white fiber needed is half of the blue fiber, so it takes 540/2 = 270 bolts of white fiber.</reason>
    white_fiber_bolts = festival_blue_fiber_bolts / 2  # 270.0
    # <reason>The new design requires a total amount of 540 + 270 = 810 bolts.</reason>
    total_bolts = festival_blue_fiber_bolts + white_fiber_bolts  # 810.0
    # <reason>The initial difference between the new design requirement and the original estimate is 810 - 18 = 792 bolts.</reason>
    bolts_difference = total_bolts - 18.0  # 792.0
    # <reason>With the 162 extra bolts needed for the expanded commission, the requirement grows to 792 + 162 = 954 bolts.</reason>
    additional_bolts_needed = bolts_difference + 162.0  # 954.0
    # <reason>Adding the 810 bolts reserved for the ceremonial banners gives the total additional amount.</reason>
    total_additional_bolts = additional_bolts_needed + 810.0  # ?
    # <reason>The result is the total number of additional bolts needed.</reason>
    result = total_additional_bolts  # ?
    return result
