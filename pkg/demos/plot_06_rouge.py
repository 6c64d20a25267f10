"""
Scoring with ROUGE-2 and ROUGE-SU4
==================================

Counts are clipped per reference and pooled over all references before
dividing.
"""

from phrasefusion.rouge import rouge2, rouge_su4

candidate = "The gunman shot ten girls at the school."
references = ["A gunman shot ten Amish girls.", "Ten girls were shot by the gunman at a school."]

print("ROUGE-2  ", rouge2(candidate, references))
print("ROUGE-SU4", rouge_su4(candidate, references))

# a summary scored against itself is perfect
print(rouge2(candidate, [candidate]))
