#: Report when pac-max stops because it hit ``max_tighten_rounds`` while more
#: than one candidate was still in the queue.
PAC_UNCONVERGED = 1<<0

#: Report when the particle filter rejected every proposal for an observation
#: and had to reinitialize its particles uniformly.
FILTER_REINIT = 1<<1

#: Report when the conditional entropy bounds came out inverted (U < L) and were
#: recomputed with doubled budgets.
BOUND_REPAIR = 1<<2

#: Report when lazier greedy had fewer than ``R`` remaining elements to sample
#: from.
LAZIER_SHORT_SAMPLE = 1<<3

#-------------------------------------------------------------------------------
#: Enable all warnings.
ALL = (
    PAC_UNCONVERGED
    | FILTER_REINIT
    | BOUND_REPAIR
    | LAZIER_SHORT_SAMPLE
)
