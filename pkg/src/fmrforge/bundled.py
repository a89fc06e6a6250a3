"""Access to the demo library, the case-study netlists and golden reports."""

from __future__ import annotations

from importlib import resources

from .circuit import CellLibrary, Netlist, load_library, load_netlist

NETLISTS = ("fig1a", "fig1b", "fig2a", "fig3a", "fig3b", "fig4a", "fig4b")


def data_text(name: str) -> str:
    return resources.files("fmrforge").joinpath("data", name).read_text(encoding="utf-8")


def has_data(name: str) -> bool:
    return resources.files("fmrforge").joinpath("data", name).is_file()


def demo_library() -> CellLibrary:
    return load_library(data_text("demo_library.json"))


def netlist(name: str, lib: CellLibrary | None = None) -> Netlist:
    """Load a bundled netlist such as ``"fig1a"``."""
    return load_netlist(data_text(f"{name}.json"), lib or demo_library())


def majority_pla() -> str:
    return data_text("majority.pla")
