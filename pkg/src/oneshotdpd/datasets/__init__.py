"""Bundled example datasets.

``table1``: the 3 x 3 reliability experiment (temperatures 35/45/55,
inspection times 10/20/30, ten devices per cell).

``ed01``: the 2-AAF (ED01) tumorigenicity study, control group (w=0)
against the highest dose (w=1), outcomes summarized at 12, 18 and 33
months as (sacrificed, died without tumour, died with tumour).

``benzidine``: the benzidine dihydrochloride study at 60 ppm (w=1) and
400 ppm (w=2), inspection months 9.37, 14.07 and 18.7, same outcome
triples.
"""

from __future__ import annotations

from importlib import resources

from ..io import read_failure_csv, read_multioutcome_csv


def dataset_path(name: str):
    """Filesystem path of a bundled CSV (``table1``, ``ed01``, ``benzidine``)."""
    resource = resources.files(__package__) / f"{name}.csv"
    if not resource.is_file():
        raise FileNotFoundError(f"no bundled dataset named {name!r}")
    return resource


def load_table1():
    """Failure table of the 3 x 3 reliability experiment."""
    return read_failure_csv(dataset_path("table1"))


def load_ed01():
    """Multi-outcome table of the ED01 study."""
    return read_multioutcome_csv(dataset_path("ed01"))


def load_benzidine():
    """Multi-outcome table of the benzidine dihydrochloride study."""
    return read_multioutcome_csv(dataset_path("benzidine"))
