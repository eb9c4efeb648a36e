"""
Worked examples
===============

Each reproduction returns a report of labelled records.  A record marked
as a violation is the point of the example: a statement that fails on a
concrete instance.
"""
from digifix.cli import repro_ege_4_10, repro_ege_4_11, repro_less_not_cocontinuous, repro_nonstd_metric

# harmonic distance on {0..n}: a metric in which k -> 0, but k + 1 does not follow
print(repro_nonstd_metric(10).text(), end="\n\n")

# a contraction against the identity whose partner map is not continuous
print(repro_less_not_cocontinuous().text(), end="\n\n")

# continuous maps with a coincidence point at which they do not commute
print(repro_ege_4_10(10).text(), end="\n\n")

# limits under the harmonic metric, traced up to the truncation bound
print(repro_ege_4_11(10).text())
