from corpus_reader import CorpusReader
from report_exporter import ReportExporter
from modules import ConfigManager, ErrorHandler, CloneDetector
from modules.core.corpus_analyzer import TOOL_VERSION
from modules.utils.error_handler import EmptyCorpusError, ExportError, ProcessingError, ValidationError
import argparse
import sys

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_EMPTY_CORPUS = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Notebook Quality Analyzer - Static analysis of Python scripts and Jupyter notebooks",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Commands:
  analyze     Lifetimes, mutation ratios, diffusion scores, doc stats and clones per corpus
  clones      Block- and file-level near-miss clone classes
  convert     Print the analyzable script of a notebook (one function per code cell)
  docstats    Markdown, comment and lines-of-code statistics
  list        List the scripts and notebooks found under the roots

Examples:
  python main.py analyze notebooks/ --policy both --out report.json
  python main.py analyze corpus_a/ corpus_b/ --format csv --out comparison.csv
  python main.py analyze notebooks/ --sample 50 --seed 7 --workers 4 --format xlsx --out report.xlsx
  python main.py clones notebooks/ --threshold 0.7 --min-lines 10 --min-instances 3 --export-nicad nicad_src
  python main.py convert analysis.ipynb --out analysis.py
  python main.py docstats notebooks/
        """
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", help="JSON configuration file merged over the defaults")
    common.add_argument("--verbose", "-v", action="store_true", help="Enable verbose output")

    corpus = argparse.ArgumentParser(add_help=False)
    corpus.add_argument("roots", nargs="+", help="Corpus directories")
    corpus.add_argument("--sample", type=int, help="Analyze a seeded random sample of N files per root")
    corpus.add_argument("--seed", type=int, help="Sampling seed (default 0)")
    corpus.add_argument("--no-recursive", dest="recursive", action="store_const", const=False,
                        help="Only scan the top level of each root")

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--out", "-o", help="Output file (stdout when omitted)")

    subparsers = parser.add_subparsers(dest="command", required=True)

    analyze = subparsers.add_parser("analyze", parents=[common, corpus, output], help="Analyze corpora")
    analyze.add_argument("--policy", choices=["optimistic", "conservative", "both"],
                         help="Unknown-call policy whose figures are reported (default both)")
    analyze.add_argument("--format", "-f", choices=["json", "csv", "xlsx"],
                         help="Report format: json, csv or xlsx (default report.format, json)")
    analyze.add_argument("--workers", "-w", type=int, help="Worker processes (default 1)")
    analyze.add_argument("--spec-table", action="append", dest="spec_tables",
                         help="Extra mutation specification table (TSV); repeatable")
    analyze.add_argument("--no-default-tables", dest="use_default_tables", action="store_const", const=False,
                         help="Do not load the bundled specification tables")
    analyze.add_argument("--no-clones", dest="clones_enabled", action="store_const", const=False,
                         help="Skip clone detection")
    analyze.add_argument("--dump-cfg", metavar="DIR", help="Write one DOT file per scope CFG")

    clones = subparsers.add_parser("clones", parents=[common, corpus, output], help="Detect clones")
    clones.add_argument("--threshold", type=float, help="Similarity threshold in (0, 1] (default 0.7)")
    clones.add_argument("--min-lines", type=int, help="High-impact minimum lines (default 10)")
    clones.add_argument("--min-instances", type=int, help="High-impact minimum instances (default 3)")
    clones.add_argument("--min-statements", type=int, help="Smallest block in statements (default 3)")
    clones.add_argument("--file-level", dest="file_level", action="store_const", const=True,
                        help="Detect file-level clones (default)")
    clones.add_argument("--no-file-level", dest="file_level", action="store_const", const=False,
                        help="Skip file-level clones")
    clones.add_argument("--export-nicad", metavar="DIR", help="Write every converted unit to DIR/<stem>.py")
    clones.add_argument("--format", "-f", choices=["json", "csv"],
                        help="Report format: json or csv (default report.format, json)")

    convert = subparsers.add_parser("convert", parents=[common, output], help="Convert a notebook")
    convert.add_argument("notebook", help="Notebook (.ipynb) or script (.py)")

    docstats = subparsers.add_parser("docstats", parents=[common, corpus, output], help="Documentation statistics")
    docstats.add_argument("--format", "-f", choices=["json", "csv"],
                          help="Report format: json or csv (default report.format, json)")

    subparsers.add_parser("list", parents=[common, corpus], help="List corpus files")
    return parser


def load_config(args: argparse.Namespace):
    """Defaults, then the config file, then CLI flags"""
    config_manager = ConfigManager(args.config)
    config_manager.apply_overrides({
        'analysis.policy': getattr(args, 'policy', None),
        'analysis.sample': getattr(args, 'sample', None),
        'analysis.seed': getattr(args, 'seed', None),
        'analysis.workers': getattr(args, 'workers', None),
        'analysis.recursive_scan': getattr(args, 'recursive', None),
        'mutation.spec_tables': getattr(args, 'spec_tables', None),
        'mutation.use_default_tables': getattr(args, 'use_default_tables', None),
        'clones.enabled': getattr(args, 'clones_enabled', None),
        'clones.threshold': getattr(args, 'threshold', None),
        'clones.min_lines': getattr(args, 'min_lines', None),
        'clones.min_instances': getattr(args, 'min_instances', None),
        'clones.min_statements': getattr(args, 'min_statements', None),
        'clones.file_level': getattr(args, 'file_level', None),
        'report.format': getattr(args, 'format', None),
        'report.dump_cfg_dir': getattr(args, 'dump_cfg', None),
    })
    return config_manager.to_analysis_config()


def report_format(args, reader: CorpusReader, choices=("json", "csv", "xlsx")) -> str:
    """--format when given, else report.format from the config file"""
    chosen = reader.config.report_format
    if chosen not in choices:
        raise ValidationError(f"Report format {chosen} is not available for {args.command}",
                              field="format", value=chosen)
    return chosen


def run_analyze(args, reader: CorpusReader) -> None:
    output_format = report_format(args, reader)
    reports = reader.analyze(args.roots)
    result = ReportExporter(args.out, reader.error_handler).export_reports(reports, output_format)

    if result['output_file']:
        print(f"✓ Report written to: {result['output_file']}")
        for report in reports:
            print(f"  {report.root}: {len(report.units)} analyzed, {len(report.excluded)} excluded")


def run_clones(args, reader: CorpusReader) -> None:
    output_format = report_format(args, reader, ("json", "csv"))
    clone_report, excluded, units = reader.clones(args.roots)

    if args.export_nicad:
        written = CloneDetector().export_units(units, args.export_nicad)
        print(f"✓ Exported {len(written)} units to: {args.export_nicad}", file=sys.stderr)

    roots = [reader.analyzer.display_root(root) for root in args.roots]
    result = ReportExporter(args.out, reader.error_handler).export_clones(
        clone_report, roots, reader.config.echo(), TOOL_VERSION, excluded, output_format)

    if result['output_file']:
        print(f"✓ Clone report written to: {result['output_file']}")
        print(f"  {len(clone_report.block_classes)} block classes, {len(clone_report.high_impact)} high-impact")


def run_convert(args, reader: CorpusReader) -> None:
    text = reader.convert(args.notebook)
    if args.out:
        try:
            with open(args.out, 'w', encoding='utf-8') as f:
                f.write(text)
        except OSError as e:
            raise ExportError(f"Cannot write {args.out}: {e}", export_type="convert", output_file=args.out)
        print(f"✓ Converted script written to: {args.out}")
    else:
        sys.stdout.write(text)


def run_docstats(args, reader: CorpusReader) -> None:
    output_format = report_format(args, reader, ("json", "csv"))
    result = ReportExporter(args.out, reader.error_handler).export_doc_stats(reader.doc_stats(args.roots), output_format)
    if result['output_file']:
        print(f"✓ Documentation statistics written to: {result['output_file']}")


def run_list(args, reader: CorpusReader) -> None:
    for summary in reader.list_files(args.roots):
        files = summary['files']
        if not files:
            print(f"No Python scripts or notebooks found in: {summary['root']}")
            continue
        print(f"Found {len(files)} files in {summary['root']} "
              f"({summary['script_count']} scripts, {summary['notebook_count']} notebooks):")
        for info in files:
            print(f"  - {info['relative_path']} ({info['kind']}, {info['size']} bytes)")


COMMANDS = {
    "analyze": run_analyze,
    "clones": run_clones,
    "convert": run_convert,
    "docstats": run_docstats,
    "list": run_list,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    error_handler = ErrorHandler()
    error_handler.set_verbose(args.verbose)

    try:
        config = load_config(args)
        reader = CorpusReader(config, error_handler)
        COMMANDS[args.command](args, reader)

    except EmptyCorpusError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_EMPTY_CORPUS
    except (ValidationError, ExportError, ProcessingError, OSError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_FATAL
    except Exception as e:
        print(f"Unexpected error: {e}", file=sys.stderr)
        return EXIT_FATAL

    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
