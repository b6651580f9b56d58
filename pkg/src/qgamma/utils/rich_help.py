"""
Custom help formatter using Rich library for better CLI output.
"""

import argparse
from io import StringIO

from rich import box
from rich.console import Console
from rich.table import Table

console = Console()


class RichHelpFormatter(argparse.RawDescriptionHelpFormatter):
    """Formatter that renders subcommand help with Rich styling."""

    def format_help(self):
        help_text = super().format_help()

        # Main parser keeps the plain argparse layout
        if " " not in self._prog:
            return help_text

        buffer = StringIO()
        rich_console = Console(file=buffer, force_terminal=True, width=100)

        section = None
        description_lines = []

        def flush_description():
            if description_lines:
                rich_console.print(f"[dim]{' '.join(description_lines)}[/dim]")
                rich_console.print()
                description_lines.clear()

        for line in help_text.split("\n"):
            stripped = line.strip()

            if line.startswith("usage:"):
                rich_console.print()
                rich_console.print(f"[bold cyan]{line}[/bold cyan]")
                rich_console.print()
                section = "usage"
                continue

            if stripped in ("positional arguments:", "arguments:"):
                flush_description()
                rich_console.print("[bold yellow]Positional Arguments[/bold yellow]")
                rich_console.print()
                section = "args"
                continue

            if stripped in ("options:", "optional arguments:"):
                flush_description()
                rich_console.print("[bold yellow]Options[/bold yellow]")
                rich_console.print()
                section = "args"
                continue

            if stripped.startswith("Examples:"):
                rich_console.print()
                rich_console.print("[bold yellow]Examples[/bold yellow]")
                rich_console.print()
                section = "examples"
                continue

            if section == "examples":
                if stripped.startswith("qgamma"):
                    rich_console.print(f"  [cyan]{stripped}[/cyan]")
                elif stripped:
                    rich_console.print(f"  {stripped}")
                continue

            if section == "args":
                if not stripped:
                    rich_console.print()
                elif line.startswith("  ") and not line.startswith("    "):
                    style = "green" if "-" in stripped[:10] else "cyan"
                    rich_console.print(f"  [{style}]{stripped}[/{style}]")
                elif line.startswith("    "):
                    rich_console.print(f"      [dim]{stripped}[/dim]")
                continue

            if section == "usage" and stripped and not stripped.endswith(":"):
                description_lines.append(stripped)

        rich_console.print()
        return buffer.getvalue()


def _command_table(title: str, rows) -> Table:
    table = Table(
        show_header=True,
        header_style="bold magenta",
        box=box.ROUNDED,
        title=f"[bold]{title}[/bold]",
        title_style="bold blue",
        title_justify="left",
    )
    table.add_column("Command", style="cyan", width=20)
    table.add_column("Description", style="white")
    for cmd, desc in rows:
        table.add_row(cmd, desc)
    return table


def print_main_help():
    """Print the main help message with rich formatting."""
    console.print()
    console.print("[bold bright_magenta]qgamma[/bold bright_magenta]  "
                  "[dim]perturbative solutions of the fractional Q_γ curvature problem[/dim]")
    console.print()

    console.print("[bold yellow]🚀 Quick Start Guide[/bold yellow]")
    console.print()
    console.print("  [bold green]1.[/bold green] Check a curvature perturbation:")
    console.print("     [cyan]qgamma check-k --n 2 --gamma 0.5 --k two-bump[/cyan]")
    console.print()
    console.print("  [bold green]2.[/bold green] Solve near the predicted bubble:")
    console.print("     [cyan]qgamma solve --n 1 --gamma 0.25 --k two-bump --epsilon 0.02[/cyan]")
    console.print()

    console.print("[bold yellow]📚 Available Commands[/bold yellow]")
    console.print()
    console.print(
        _command_table(
            "🧮 Analysis Commands",
            [
                ("check-k", "Verify (K1)–(K6) and the applicability verdict"),
                ("landscape", "Grid scan of the reduced functional Γ"),
                ("degree", "Brouwer degrees of K′ and Γ′ with bookkeeping"),
                ("verify-bubble", "Bubble identity, constants and nondegeneracy"),
            ],
        )
    )
    console.print()
    console.print(
        _command_table(
            "🔧 Solver Commands",
            [
                ("solve", "Newton–Galerkin solve at one ε"),
                ("sweep", "Warm-started ε continuation with fitted rate"),
                ("report", "Merge run artifacts into one bundle"),
            ],
        )
    )
    console.print()

    console.print("[bold yellow]💡 Example Usage[/bold yellow]")
    console.print()
    examples = [
        ("Run from a config file", "qgamma check-k --config run.json --output-dir out"),
        ("Custom K expression", "qgamma check-k --n 2 --gamma 0.5 --k 'gauss(a=1, c=(1,0), w=0.8) + gauss(a=1, c=(-1,0), w=0.8)'"),
        ("Sweep ε", "qgamma sweep --n 1 --gamma 0.25 --k two-bump --eps 0.005 0.01 0.02 0.04"),
        ("Consolidate artifacts", "qgamma report --output-dir out"),
    ]
    for desc, cmd in examples:
        console.print(f"  [dim]{desc}:[/dim]")
        console.print(f"  [green]{cmd}[/green]")
        console.print()

    console.print("[bold yellow]ℹ️  Help & Documentation[/bold yellow]")
    console.print()
    console.print("  For detailed help on any command:")
    console.print("  [cyan]qgamma <command> --help[/cyan]")
    console.print()


__all__ = ["RichHelpFormatter", "print_main_help"]
