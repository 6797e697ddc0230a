"""Class-label constants.

Every stream in this package is two-class: +1 is the positive class (minority
by construction in the skewed presets) and -1 the negative class.
"""

POS = 1
NEG = -1
LABELS = (POS, NEG)
