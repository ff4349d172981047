def solution():
    # <reason>Import math package for computing combinations.</reason>
    from math import comb
    # <reason>For getting exactly 2 numbers right: We have C(4,2) ways to choose which 2 of Jen's 4 numbers match the lottery,
    # and C(6,2) ways for the lottery to choose the other 2 numbers from the remaining 6 numbers.</reason>
    ways_two_match = comb(4, 2) * comb(6, 2)
    # <reason>For getting exactly 3 numbers right: We have C(4,3) ways to choose which 3 of Jen's 4 numbers match the lottery,
    # and C(6,1) ways for the lottery to choose the last number from the remaining 6 numbers.</reason>
    ways_three_match = comb(4, 3) * comb(6, 1)
    # <reason>For getting all 4 numbers right: There is only 1 way - all of Jen's numbers must match.</reason>
    ways_four_match = 1
    # <reason>Total number of favorable cases (winning a prize) is the sum of the ways to get 2, 3, or 4 matches.</reason>
    total_favorable_cases = ways_two_match + ways_three_match + ways_four_match
    # <reason>The probability of winning the grand prize given that she won a prize is 1/115, already in lowest terms.</reason>
    m = 1  # numerator
    n = total_favorable_cases  # denominator
    # <reason>The answer is m + n = 1 + 115 = 116.</reason>
    result = m + n
    return result
