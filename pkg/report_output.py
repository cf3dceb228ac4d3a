"""Text, html and JSON rendering of cohomology results and comparison reports."""
import json

from colorama import Fore, Style
from tabulate import tabulate

try:
    from .cohomology_engine import (
        EQUAL,
        EXTENSION_PROBLEM,
        CohomologyReport,
        DegreeComparison,
    )
    from .exact_linalg import AbelianGroupInvariants
except ImportError:
    from cohomology_engine import (
        EQUAL,
        EXTENSION_PROBLEM,
        CohomologyReport,
        DegreeComparison,
    )
    from exact_linalg import AbelianGroupInvariants

VERDICT_COLOURS = {
    EQUAL: Fore.GREEN,
    EXTENSION_PROBLEM: Fore.YELLOW,
}


def markup(output_type):
    """(table_format, bold, nobold, p) for the given output type."""
    if output_type == "html":
        return "html", "<b>", "</b>", "\n<p>"
    elif output_type == "text":
        return "simple", "\033[1m", "\033[0m", "\n"
    else:
        return "simple", "", "", "\n"


def group_text(group):
    return group.render()


def _verdict_text(verdict, output_type):
    if output_type != "text":
        return verdict
    colour = VERDICT_COLOURS.get(verdict, Fore.RED)
    return f"{colour}{verdict}{Style.RESET_ALL}"


def tail_line(tail, n):
    even, odd = tail
    return f"H^{{2k}} = {even}, H^{{2k+1}} = {odd} for 2k >= {n + 1}"


def _title(label, n, q):
    name = f"{label}: " if label else ""
    return f"{name}Z^{n} x Z_{q}"


def render_cohomology(result, label, q, output_type="text"):
    """
    Per-degree table of H^k(Γ) followed by the periodic tail line.

    Parameters:
    - result (GammaCohomology): the computed groups.
    - label (str): name shown in the heading.
    - q (int): holonomy order.
    - output_type (str): "text", "html" or "plain".
    """
    if output_type == "json":
        return to_json(cohomology_document(result, label, q))
    table_format, bold, nobold, p = markup(output_type)
    rows = [[k, group_text(group)] for k, group in enumerate(result.groups)]
    table = tabulate(rows, headers=["k", "H^k"], tablefmt=table_format)
    output = f"{bold}{_title(label, result.n, q)}{nobold}{p}{table}{p}"
    if result.tail is not None:
        output += f"{tail_line(result.tail, result.n)}{p}"
    return output


def render_e2(e2, label, q, output_type="text"):
    """Table of H^i(Z_q, H^j) with one row per j, then the degree sums."""
    if output_type == "json":
        return to_json(e2_document(e2, label, q))
    table_format, bold, nobold, p = markup(output_type)
    headers = ["j \\ i"] + [str(i) for i in range(e2.top_degree + 1)]
    rows = [
        [j] + [group_text(e2.entry(i, j)) for i in range(e2.top_degree + 1)]
        for j in range(e2.n + 1)
    ]
    table = tabulate(rows, headers=headers, tablefmt=table_format)
    sums = tabulate(
        [[k, group_text(total)] for k, total in enumerate(e2.sums)],
        headers=["k", "E2 sum"],
        tablefmt=table_format,
    )
    output = f"{bold}{_title(label, e2.n, q)}{nobold}{p}{table}{p}{sums}{p}"
    output += f"{tail_line(e2.tail, e2.n)}{p}"
    return output


def render_check(report, output_type="text"):
    """Two-column comparison with a verdict per degree and the overall outcome."""
    if output_type == "json":
        return to_json(report_document(report))
    table_format, bold, nobold, p = markup(output_type)
    rows = [
        [comparison.degree, group_text(comparison.lhs), group_text(comparison.rhs),
         _verdict_text(comparison.verdict, output_type)]
        for comparison in list(report.degrees) + list(report.tail)
    ]
    table = tabulate(rows, headers=["k", "H^k(Γ)", "E2 sum", "verdict"], tablefmt=table_format)
    output = f"{bold}{_title(report.label, report.n, report.q)}{nobold}{p}{table}{p}"
    if report.holds:
        output += f"Conjecture holds through degree {report.top_degree}{p}"
    elif report.first_failure is None:
        output += f"Counterexample found in the periodic tail{p}"
    else:
        output += f"Counterexample found at degree {report.first_failure}{p}"
    return output


def to_json(document):
    return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False)


def _group_entry(degree, group):
    entry = {"degree": degree}
    entry.update(group.to_dict())
    return entry


def cohomology_document(result, label, q):
    document = {
        "label": label,
        "n": result.n,
        "q": q,
        "top_degree": len(result.groups) - 1,
        "groups": [_group_entry(k, group) for k, group in enumerate(result.groups)],
        "tail": None,
    }
    if result.tail is not None:
        document["tail"] = {"even": result.tail[0].to_dict(), "odd": result.tail[1].to_dict()}
    return document


def e2_document(e2, label, q):
    table = []
    for j in range(e2.n + 1):
        for i in range(e2.top_degree + 1):
            entry = {"i": i, "j": j}
            entry.update(e2.entry(i, j).to_dict())
            table.append(entry)
    return {
        "label": label,
        "n": e2.n,
        "q": q,
        "top_degree": e2.top_degree,
        "table": table,
        "sums": [_group_entry(k, total) for k, total in enumerate(e2.sums)],
    }


def _comparison_entry(comparison):
    return {
        "degree": comparison.degree,
        "lhs": comparison.lhs.to_dict(),
        "rhs": comparison.rhs.to_dict(),
        "verdict": comparison.verdict,
    }


def report_document(report):
    return {
        "label": report.label,
        "n": report.n,
        "q": report.q,
        "top_degree": report.top_degree,
        "degrees": [_comparison_entry(c) for c in report.degrees],
        "tail": [_comparison_entry(c) for c in report.tail],
        "first_failure": report.first_failure,
        "holds": report.holds,
    }


def _comparison_from_entry(entry):
    return DegreeComparison(
        entry["degree"],
        AbelianGroupInvariants.from_dict(entry["lhs"]),
        AbelianGroupInvariants.from_dict(entry["rhs"]),
        entry["verdict"],
    )


def report_from_json(text):
    """Inverse of the JSON rendering of a comparison report."""
    document = json.loads(text) if isinstance(text, str) else text
    return CohomologyReport(
        label=document["label"],
        n=document["n"],
        q=document["q"],
        top_degree=document["top_degree"],
        degrees=[_comparison_from_entry(entry) for entry in document["degrees"]],
        tail=[_comparison_from_entry(entry) for entry in document["tail"]],
    )
