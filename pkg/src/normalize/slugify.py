"""Slugify utility for generating stable, file-safe identifiers."""

import re
import unicodedata


def slugify(text: str) -> str:
    """Convert text to a lowercase, hyphen-separated slug.

    Used for experiment ids and output file names, e.g. an indicator label
    ``"Real GDP (q/q)"`` becomes ``"real-gdp-qq"``.
    """
    text = text.strip()
    text = unicodedata.normalize("NFKD", text).encode("ascii", "ignore").decode("ascii")
    text = text.lower()
    text = re.sub(r"[^a-z0-9\s_-]", "", text)
    text = re.sub(r"[\s_]+", "-", text)
    text = re.sub(r"-+", "-", text)
    return text.strip("-")
