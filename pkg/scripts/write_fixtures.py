"""Regenerate the committed fixture corpus from the in-code builders."""
from __future__ import annotations

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from pidcheck.cli import serialize_document
from pidcheck.figures import ALL_FIGURES, FIGURE_REALIZATIONS, fig4_realization


def main() -> None:
    out = pathlib.Path(__file__).resolve().parents[1] / "fixtures"
    out.mkdir(exist_ok=True)
    for name, builder in ALL_FIGURES.items():
        d = builder()
        realization = None
        maker = FIGURE_REALIZATIONS.get(name)
        if maker is not None:
            realization = maker()
        (out / f"{name}.pid").write_text(serialize_document(d, realization))
    # second utility variant used by the strategy-flip test
    (out / "fig4_psi2.pid").write_text(
        serialize_document(ALL_FIGURES["fig4"](), fig4_realization((3.0, 0.0)))
    )
    print(f"wrote {len(ALL_FIGURES) + 1} fixture files to {out}")


if __name__ == "__main__":
    main()
