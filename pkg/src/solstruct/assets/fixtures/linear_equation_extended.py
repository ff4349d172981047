def solution():
    # <reason>From the equation $5x - 3 = 12$, we can solve for $5x$ by adding 3 to both sides.</reason>
    right_hand_side = 12
    constant_term = 3
    # <reason>Adding 3 to both sides gives $5x = 12 + 3 = 15$.</reason>
    five_x = right_hand_side + constant_term
    # <reason>We now form three expressions from these quantities: $5x + 3$, the right hand side, and $5x$ itself.</reason>
    expression1 = five_x + constant_term
    expression2 = right_hand_side
    expression3 = five_x
    # <reason>Let $a$ be the first expression and $b$ the second.</reason>
    a = expression1
    b = expression2
    # <reason>Their difference $a - b$ will be combined with the factored form of $a^5 - b^5$.</reason>
    difference = a - b
    # <reason>Multiplying the difference by $a^4 + a^3 b + a^2 b^2 + a b^3 + b^4$ gives $a^5 - b^5$.</reason>
    result1 = difference * (a**4 + a**3 * b + a**2 * b**2 + a * b**3 + b**4)
    # <reason>Finally we add the fifth power of the third expression to obtain the answer.</reason>
    result = result1 + expression3**5
    return result
