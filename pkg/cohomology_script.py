import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor

from colorama import init
from tabulate import tabulate

try:
    from . import version
    from . import db_manager
    from . import catalog
    from . import cohomology_engine
    from . import report_output
except ImportError:
    import version
    import db_manager
    import catalog
    import cohomology_engine
    import report_output

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_COUNTEREXAMPLE = 3

SETTING_KEYS = ["Top Degree", "Format", "No Periodicity Check"]


class TopDegreeAction(argparse.Action):
    def __call__(self, parser, namespace, values, option_string=None):
        if values < 1:
            parser.error(f"The {self.dest} argument must be at least 1, got {values}.")
        setattr(namespace, self.dest, values)


class JobsAction(argparse.Action):
    def __call__(self, parser, namespace, values, option_string=None):
        if values < 1:
            parser.error(f"The {self.dest} argument must be a positive number of workers.")
        setattr(namespace, self.dest, values)


def _group_options():
    options = argparse.ArgumentParser(add_help=False)
    options.add_argument(
        "--catalog-id",
        dest="catalog_id",
        action="append",
        metavar="ID",
        help="Bundled catalog entry (see 'catalog') or a name saved with --save_as. Repeatable.",
    )
    options.add_argument(
        "--input",
        action="append",
        metavar="FILE",
        help="Group descriptor file (JSON or plain text with label, n, q, rows). Repeatable.",
    )
    options.add_argument(
        "--top-degree",
        dest="top_degree",
        type=int,
        action=TopDegreeAction,
        help="Highest cohomological degree to report. (Default: n+2)",
    )
    options.add_argument(
        "--format",
        choices=["text", "json", "html"],
        help='Output format. (Default: "text")',
    )
    options.add_argument(
        "--no-periodicity-check",
        dest="no_periodicity_check",
        action="store_true",
        help="Skip the extra degrees computed to cross-check H^(n+1) = H^(n+3).",
    )
    options.add_argument(
        "--save_as",
        type=str,
        metavar="NAME",
        help="Store the (single) group of this run in the database under NAME.",
    )
    options.add_argument(
        "--save_settings",
        type=str,
        nargs="?",
        const="default",
        help='Store --top-degree, --format and --no-periodicity-check as defaults <name>. (Default name: "default")',
    )
    options.add_argument(
        "--use_saved_settings",
        type=str,
        nargs="?",
        const="default",
        help='Use settings stored by name <name>. If no name passed will use "default"',
    )
    return options


def argparser(argv=None):
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="Log progress of the computation to stderr.")

    parser = argparse.ArgumentParser(
        description="""Integral cohomology of split crystallographic groups Z^n x Z_q,
the E2-page of the extension Z^n -> Z^n x Z_q -> Z_q, and the comparison of the two.
Exit status: 0 success, 3 counterexample found, 1 error.""",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {version.__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    group_options = _group_options()
    subparsers.add_parser("cohomology", parents=[common, group_options], help="H^k of the group.")
    subparsers.add_parser("e2", parents=[common, group_options], help="The E2-page H^i(Z_q, H^j(Z^n)).")
    check = subparsers.add_parser("check", parents=[common, group_options], help="Compare H^k with the E2 sums.")
    check.add_argument(
        "--jobs",
        type=int,
        action=JobsAction,
        default=1,
        help="Worker processes when several groups are given. (Default: 1)",
    )

    listing = subparsers.add_parser("catalog", parents=[common], help="List bundled and saved groups.")
    listing.add_argument("--catalog-id", dest="catalog_id", action="append", metavar="ID",
                         help="Show one entry in full.")
    listing.add_argument("--saved_names", action="store_true", help="List names of saved groups.")
    listing.add_argument(
        "--remove_saved_names",
        type=str,
        nargs="+",
        metavar="NAME",
        help="Remove saved groups (e.g. \"first, second\").",
    )
    listing.add_argument("--format", choices=["text", "json", "html"])

    selftest = subparsers.add_parser("selftest", parents=[common], help="Check catalog entries against their expected groups.")
    selftest.add_argument("--max-dim", dest="max_dim", type=int, default=5,
                          help="Skip entries of larger dimension. (Default: 5)")
    selftest.add_argument("--all", dest="include_slow", action="store_true",
                          help="Include entries marked slow.")
    selftest.add_argument("--format", choices=["text", "json", "html"])

    args = parser.parse_args(argv)

    if getattr(args, "save_as", None) and len((args.catalog_id or []) + (args.input or [])) != 1:
        parser.error("--save_as needs exactly one group.")

    arguments = {
        "Command": args.command,
        "Catalog Id": getattr(args, "catalog_id", None),
        "Input": getattr(args, "input", None),
        "Top Degree": getattr(args, "top_degree", None),
        "Format": getattr(args, "format", None),
        "No Periodicity Check": getattr(args, "no_periodicity_check", False),
        "Jobs": getattr(args, "jobs", 1),
        "Save As": getattr(args, "save_as", None),
        "Save Settings": getattr(args, "save_settings", None),
        "Use Saved Settings": getattr(args, "use_saved_settings", None),
        "Saved Names": getattr(args, "saved_names", False),
        "Remove Saved Names": getattr(args, "remove_saved_names", None),
        "Max Dim": getattr(args, "max_dim", 5),
        "Include Slow": getattr(args, "include_slow", False),
        "Verbose": args.verbose,
    }
    return arguments


def resolve_group(name):
    """A catalog entry by id, falling back to a saved group of that name."""
    try:
        return catalog.lookup(name).to_group()
    except catalog.CatalogLookupError:
        saved = db_manager.get_group(name)
        if saved is None:
            raise
        return catalog.parse_group(saved)


def resolve_groups(args):
    groups = [resolve_group(name) for name in args["Catalog Id"] or []]
    groups += [catalog.load_group_file(filename) for filename in args["Input"] or []]
    if not groups:
        raise ValueError("No group given, use --catalog-id or --input.")
    return groups


def run_cohomology(group, top_degree=None, output_type="text", check_periodicity=True):
    result = cohomology_engine.gamma_cohomology(group, top_degree, check_periodicity)
    return report_output.render_cohomology(result, group.label, group.q, output_type)


def run_e2(group, top_degree=None, output_type="text"):
    e2 = cohomology_engine.e2_page(group, top_degree)
    return report_output.render_e2(e2, group.label, group.q, output_type)


def run_check(group, top_degree=None, output_type="text", check_periodicity=True):
    """
    Rendered comparison report.

    Returns:
    - tuple: (rendered text, report).
    """
    report = cohomology_engine.compare_conjecture(group, top_degree, check_periodicity)
    return report_output.render_check(report, output_type), report


def _check_descriptor(descriptor, top_degree, output_type, check_periodicity):
    group = catalog.parse_group(descriptor)
    text, report = run_check(group, top_degree, output_type, check_periodicity)
    return text, report.holds


def list_catalog(output_type="text"):
    rows = [[entry.id, entry.dim, entry.order, entry.source] for entry in catalog.list_catalog()]
    if output_type == "json":
        return report_output.to_json([entry.descriptor() | {"source": entry.source} for entry in catalog.list_catalog()])
    table_format, bold, nobold, p = report_output.markup(output_type)
    return tabulate(rows, headers=["id", "n", "q", "source"], tablefmt=table_format) + p


def show_entry(entry, output_type="text"):
    if output_type == "json":
        return report_output.to_json(entry.descriptor() | {"source": entry.source, "expected": entry.expected})
    table_format, bold, nobold, p = report_output.markup(output_type)
    matrix = tabulate(entry.rows, tablefmt=table_format)
    return f"{bold}{entry.id}{nobold} ({entry.label}){p}{entry.source}{p}{matrix}{p}"


def selftest(max_dim=5, include_slow=False, output_type="text"):
    """
    Recompute every catalog entry that carries expected values.

    Returns:
    - tuple: (rendered table, True if every entry passed).
    """
    rows = []
    passed = True
    for entry in catalog.list_catalog():
        if not entry.expected or entry.dim > max_dim or (entry.slow and not include_slow):
            continue
        failures = check_entry(entry)
        passed = passed and not failures
        rows.append([entry.id, "ok" if not failures else "FAILED", "; ".join(failures)])
    if output_type == "json":
        return report_output.to_json([{"id": r[0], "status": r[1], "detail": r[2]} for r in rows]), passed
    table_format, bold, nobold, p = report_output.markup(output_type)
    return tabulate(rows, headers=["id", "status", "detail"], tablefmt=table_format) + p, passed


def check_entry(entry):
    """Differences between an entry's expected block and a fresh computation."""
    group = entry.to_group()
    top_degree = entry.expected.get("top_degree", group.n + 2)
    check_periodicity = entry.expected.get("check_periodicity", True)
    report = cohomology_engine.compare_conjecture(group, top_degree, check_periodicity)
    gamma = report.gamma
    failures = []
    for degree, expected in entry.expected_cohomology().items():
        if gamma.groups[degree] != expected:
            failures.append(f"H^{degree} = {gamma.groups[degree]}, expected {expected}")
    expected_tail = entry.expected_tail()
    if expected_tail and gamma.tail != expected_tail:
        failures.append(f"tail {gamma.tail[0]} / {gamma.tail[1]}, expected {expected_tail[0]} / {expected_tail[1]}")
    for degree, expected in entry.expected_e2().items():
        if report.e2.degree_sum(degree) != expected:
            failures.append(f"E2 degree {degree} = {report.e2.degree_sum(degree)}, expected {expected}")
    verdicts = {c.degree: c.verdict for c in report.degrees}
    for degree, expected in entry.expected_verdicts().items():
        if verdicts.get(degree) != expected:
            failures.append(f"verdict at {degree} is {verdicts.get(degree)}, expected {expected}")
    return failures


def _apply_saved_settings(args):
    stored_defaults = db_manager.read_defaults(args["Use Saved Settings"])
    if not stored_defaults:
        logger.warning("No stored settings named %s", args["Use Saved Settings"])
    for key in SETTING_KEYS:
        if not args.get(key) and stored_defaults.get(key) is not None:
            args[key] = stored_defaults[key]


def main(cli_arguments=None):
    args = cli_arguments if cli_arguments else argparser()
    logging.basicConfig(
        level=logging.DEBUG if args.get("Verbose") else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    init()

    if args.get("Use Saved Settings"):
        _apply_saved_settings(args)
    if args.get("Save Settings"):
        defaults_to_store = {"Name": args["Save Settings"]}
        defaults_to_store.update({key: args.get(key) for key in SETTING_KEYS})
        db_manager.store_defaults(defaults_to_store)

    output_type = args.get("Format") or "text"
    command = args["Command"]
    check_periodicity = not args.get("No Periodicity Check")

    try:
        if command == "catalog":
            if args.get("Remove Saved Names"):
                names = [name.strip() for value in args["Remove Saved Names"] for name in value.split(",") if name.strip()]
                message = db_manager.remove_saved_names(names, output_type)
                if message:
                    print(message)
            if args.get("Saved Names"):
                print("Names stored in db:")
                for name in db_manager.read_saved_names():
                    print(f"{name}")
                return EXIT_OK
            if args.get("Catalog Id"):
                for entry_id in args["Catalog Id"]:
                    print(show_entry(catalog.lookup(entry_id), output_type))
            elif not args.get("Remove Saved Names"):
                print(list_catalog(output_type))
            return EXIT_OK

        if command == "selftest":
            text, passed = selftest(args.get("Max Dim", 5), args.get("Include Slow"), output_type)
            print(text)
            return EXIT_OK if passed else EXIT_ERROR

        groups = resolve_groups(args)
        if args.get("Save As"):
            db_manager.save_group(args["Save As"], groups[0].descriptor())

        top_degree = args.get("Top Degree")
        if command == "cohomology":
            for group in groups:
                print(run_cohomology(group, top_degree, output_type, check_periodicity))
            return EXIT_OK

        if command == "e2":
            for group in groups:
                print(run_e2(group, top_degree, output_type))
            return EXIT_OK

        if command == "check":
            descriptors = [group.descriptor() for group in groups]
            jobs = min(args.get("Jobs") or 1, len(descriptors))
            arguments = ([top_degree] * len(descriptors), [output_type] * len(descriptors),
                         [check_periodicity] * len(descriptors))
            if jobs > 1:
                with ProcessPoolExecutor(max_workers=jobs) as executor:
                    outcomes = list(executor.map(_check_descriptor, descriptors, *arguments))
            else:
                outcomes = list(map(_check_descriptor, descriptors, *arguments))
            for text, _ in outcomes:
                print(text)
            return EXIT_OK if all(holds for _, holds in outcomes) else EXIT_COUNTEREXAMPLE

        raise ValueError(f"Unknown command {command}")
    except (ValueError, KeyError, OSError) as e:
        message = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"Error: {message}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
