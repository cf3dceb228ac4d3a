"""
Bundled holonomy matrices and the group descriptor format.

A descriptor is a JSON object {"label": ..., "n": 4, "q": 4, "rows": [[...], ...]}
or the same fields as plain text::

    label: my group
    n: 2
    q: 4
    rows:
    0 -1
    1 0

Rows are the matrix M acting on column vectors on the left. CARAT lists the
transposed matrix, so a holonomy representation has to be transposed before
it is identified in CARAT.
"""
import json
import logging
import os
from dataclasses import dataclass
from typing import Optional

try:
    from .exact_linalg import AbelianGroupInvariants
    from .group_model import HolonomyAction
except ImportError:
    from exact_linalg import AbelianGroupInvariants
    from group_model import HolonomyAction

logger = logging.getLogger(__name__)

CATALOG_DIR = os.getenv("CRYSTAL_CATALOG_DIR")
CATALOG_FILE = "holonomy_catalog.json"

_catalog_cache = {}


class CatalogLookupError(KeyError):
    """No catalog entry with the requested id."""


class GroupParseError(ValueError):
    """A group descriptor is malformed."""


@dataclass
class CatalogEntry:
    id: str
    label: str
    dim: int
    order: int
    rows: list
    source: str
    expected: Optional[dict] = None
    slow: bool = False

    def descriptor(self):
        return {"label": self.id, "n": self.dim, "q": self.order, "rows": self.rows}

    def to_group(self):
        return parse_group(self.descriptor())

    def expected_cohomology(self):
        """Expected H^k as {degree: AbelianGroupInvariants}."""
        if not self.expected:
            return {}
        return {
            int(degree): AbelianGroupInvariants.from_string(text)
            for degree, text in self.expected.get("cohomology", {}).items()
        }

    def expected_tail(self):
        if not self.expected or "tail" not in self.expected:
            return None
        tail = self.expected["tail"]
        return AbelianGroupInvariants.from_string(tail["even"]), AbelianGroupInvariants.from_string(tail["odd"])

    def expected_e2(self):
        if not self.expected:
            return {}
        return {
            int(degree): AbelianGroupInvariants.from_string(text)
            for degree, text in self.expected.get("e2", {}).items()
        }

    def expected_verdicts(self):
        if not self.expected:
            return {}
        return {int(degree): verdict for degree, verdict in self.expected.get("verdicts", {}).items()}


def catalog_path():
    if CATALOG_DIR:
        return os.path.join(CATALOG_DIR, CATALOG_FILE)
    return os.path.join(os.path.dirname(os.path.abspath(__file__)), "catalog", CATALOG_FILE)


def read_catalog(filename=None):
    """
    Read the bundled catalog.

    Parameters:
    - filename (str): override of the catalog location.

    Returns:
    - list: CatalogEntry objects in file order.

    Raises:
    - FileNotFoundError: If the catalog file cannot be found.
    - IOError: If there is an issue reading from the file.
    """
    filename = filename or catalog_path()
    if filename in _catalog_cache:
        return _catalog_cache[filename]
    try:
        with open(filename, mode="r", encoding="utf-8") as file:
            document = json.load(file)
    except FileNotFoundError:
        raise FileNotFoundError(f"The catalog file '{filename}' was not found.")
    except IOError as e:
        raise IOError(f"An error occurred while reading from '{filename}': {e}")

    entries = [
        CatalogEntry(
            id=item["id"],
            label=item.get("label", item["id"]),
            dim=item["dim"],
            order=item["order"],
            rows=item["rows"],
            source=item.get("source", ""),
            expected=item.get("expected"),
            slow=item.get("slow", False),
        )
        for item in document["entries"]
    ]
    _catalog_cache[filename] = entries
    logger.debug("Read %d catalog entries from %s", len(entries), filename)
    return entries


def list_catalog():
    return list(read_catalog())


def lookup(entry_id):
    for entry in read_catalog():
        if entry.id == entry_id:
            return entry
    raise CatalogLookupError(f"No catalog entry named '{entry_id}'")


def _parse_text(text):
    document = {}
    rows = []
    in_rows = False
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, colon, value = line.partition(":")
        key = key.strip().lower()
        if colon and key in ("label", "n", "q", "exact_order", "rows"):
            in_rows = key == "rows"
            if not in_rows:
                document[key] = value.strip()
            continue
        if not in_rows:
            raise GroupParseError(f"Unexpected line '{line}' before 'rows:'")
        rows.append(line.replace(",", " ").split())
    document["rows"] = rows
    return document


def _as_int(value, what):
    if isinstance(value, bool):
        raise GroupParseError(f"{what} must be an integer, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value.strip())
        except ValueError:
            pass
    raise GroupParseError(f"{what} must be an integer, got {value!r}")


def _as_bool(value, what):
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.strip().lower() in ("true", "false"):
        return value.strip().lower() == "true"
    raise GroupParseError(f"{what} must be true or false, got {value!r}")


def parse_group(document):
    """
    Build a validated HolonomyAction from a descriptor.

    Parameters:
    - document: dict, or JSON / plain-text string.

    Raises:
    - GroupParseError: if fields are missing or not integers, or n disagrees with the rows.
    - HolonomyValidationError: if the matrix is not an order-q lattice automorphism.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError:
            document = _parse_text(document)
    if not isinstance(document, dict):
        raise GroupParseError("A group descriptor must be an object with n, q and rows")
    for key in ("q", "rows"):
        if key not in document:
            raise GroupParseError(f"Group descriptor is missing '{key}'")

    rows = document["rows"]
    if not isinstance(rows, list) or not all(isinstance(row, list) for row in rows):
        raise GroupParseError("'rows' must be a list of lists of integers")
    matrix = [
        [_as_int(value, f"Entry ({i + 1}, {j + 1})") for j, value in enumerate(row)]
        for i, row in enumerate(rows)
    ]
    n = _as_int(document.get("n", len(matrix)), "n")
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise GroupParseError(f"Expected a {n} x {n} matrix, got rows of lengths {[len(row) for row in matrix]}")
    q = _as_int(document["q"], "q")
    exact_order = _as_bool(document.get("exact_order", True), "exact_order")
    return HolonomyAction(matrix, q, label=document.get("label"), exact_order=exact_order)


def load_group_file(filename):
    try:
        with open(filename, mode="r", encoding="utf-8") as file:
            text = file.read()
    except FileNotFoundError:
        raise FileNotFoundError(f"The input file '{filename}' was not found.")
    group = parse_group(text)
    if group.label is None:
        group.label = os.path.splitext(os.path.basename(filename))[0]
    return group
