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
    # <reason>The number of ways to win the medium prize or better is the number of ways to match at least 3 numbers.</reason>
    total_medium_or_better = ways_three_match + ways_four_match
    # <reason>The probability of winning the grand prize given a medium prize or better is 1/25, already in lowest terms.</reason>
    m = 1  # numerator
    n = total_medium_or_better  # denominator
    # <reason>The answer is m + n = 1 + 25 = 26.</reason>
    result = m + n
    return result
