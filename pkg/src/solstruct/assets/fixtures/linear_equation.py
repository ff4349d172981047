def solution():
    # <reason>From the equation $5x - 3 = 12$, we can solve for $5x$ by adding 3 to both sides.</reason>
    right_hand_side = 12
    constant_term = 3
    # <reason>Adding 3 to both sides gives $5x = 12 + 3 = 15$.</reason>
    five_x = right_hand_side + constant_term
    # <reason>Now for the expression $5x + 3$, we take the value of $5x$ which is 15 and add 3.</reason>
    # <reason>Therefore, $5x + 3 = 15 + 3 = $\boxed{18}.</reason>
    result = five_x + constant_term
    return result
