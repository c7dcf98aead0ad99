"""Published summary values of four laypeople guessing experiments.

Only the summaries are public here (N, truth, crowd mean, diversity), not
the individual guesses, so these feed the bias test and regression checks
directly rather than through an Experiment.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ReferencePanel:
    id: str
    n: int
    truth: float
    mean: float
    delta: float
    # share of guesses that beat the crowd, as reported
    xi: float


REFERENCE_PANELS: tuple[ReferencePanel, ...] = (
    ReferencePanel("candies", n=105, truth=636.0, mean=531.0, delta=48736.0, xi=0.30),
    ReferencePanel("paper-strip", n=139, truth=22.4, mean=22.0, delta=12.42, xi=0.15),
    ReferencePanel("beans", n=97, truth=1.75, mean=1.91, delta=0.58, xi=0.16),
    ReferencePanel("book", n=140, truth=784.0, mean=560.0, delta=40332.0, xi=0.38),
)


def reference_panel(panel_id: str) -> ReferencePanel:
    for panel in REFERENCE_PANELS:
        if panel.id == panel_id:
            return panel
    raise KeyError(panel_id)
