"""PNG figures of run tables (opt-in via ``eitsim run --plot``)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .runner import Table  # noqa: E402


def _by_case(table: Table, x_name, y_names):
    labels = table.column("case") if "case" in table.header else [""] * len(table.rows)
    out = {}
    for i, lab in enumerate(labels):
        out.setdefault(str(lab), []).append(i)
    for lab, idx in out.items():
        x = np.array([table.rows[i][table.header.index(x_name)] for i in idx], dtype=float)
        ys = {y: np.array([table.rows[i][table.header.index(y)] for i in idx], dtype=float) for y in y_names}
        yield lab, x, ys


def _spectrum(ax, table):
    x = np.array(table.column("delta_raman [Hz]"), dtype=float) / 1e3
    for name in table.header[1:]:
        ax.plot(x, table.column(name), label=name[2:].replace(" [dimensionless]", ""))
    ax.set_xlabel("Raman detuning (kHz)")
    ax.set_ylabel("transmission")


def _width(ax, table):
    for lab, x, ys in _by_case(table, "intensity [W/m^2]", ["fwhm_hz [Hz]"]):
        ax.plot(x, ys["fwhm_hz [Hz]"] / 1e3, "o-", ms=3, label=lab or None)
    ax.set_xlabel("coupling intensity (W/m$^2$)")
    ax.set_ylabel("EIT FWHM (kHz)")


def _transmission(ax, table):
    for lab, x, ys in _by_case(table, "intensity [W/m^2]", ["T_closed_form [dimensionless]", "T_full_model [dimensionless]"]):
        (line,) = ax.plot(x, ys["T_closed_form [dimensionless]"], "-", label=f"{lab} closed form".strip())
        ax.plot(x, ys["T_full_model [dimensionless]"], "o", ms=3, color=line.get_color(), label=f"{lab} full model".strip())
    ax.set_xlabel("coupling intensity (W/m$^2$)")
    ax.set_ylabel("line-centre transmission")


def _delay(ax, table):
    for lab, x, ys in _by_case(table, "intensity [W/m^2]", ["tau_analytic [s]", "tau_numeric [s]"]):
        (line,) = ax.plot(x, ys["tau_analytic [s]"] * 1e6, "-", label=f"{lab} analytic".strip())
        ax.plot(x, ys["tau_numeric [s]"] * 1e6, "o", ms=3, color=line.get_color(), label=f"{lab} pulse".strip())
    ax.set_xscale("log")
    ax.set_xlabel("coupling intensity (W/m$^2$)")
    ax.set_ylabel("group delay (µs)")


def _transit(ax, table):
    d = np.array(table.column("diameter [m]"), dtype=float) * 1e2
    ax.plot(d, np.array(table.column("gamma_raman_over_2pi [Hz]"), dtype=float) / 1e3, "o-")
    ax.set_xlabel("beam diameter (cm)")
    ax.set_ylabel(r"$\Gamma_R/2\pi$ (kHz)")


def _regression(ax, table):
    names = [str(v) or "data" for v in table.column("case")]
    ax.bar(names, np.array(table.column("gamma_raman_over_2pi [Hz]"), dtype=float) / 1e3)
    ax.set_ylabel(r"fitted $\Gamma_R/2\pi$ (kHz)")


def _fit_spectrum(ax, table):
    names = [str(v).replace("T ", "").replace(" [dimensionless]", "") for v in table.column("column")]
    ax.bar(names, np.array(table.column("fwhm [Hz]"), dtype=float) / 1e3)
    ax.set_ylabel("fitted FWHM (kHz)")
    ax.tick_params(axis="x", rotation=60)


PLOTTERS = {
    "spectrum": _spectrum,
    "width-sweep": _width,
    "transmission-sweep": _transmission,
    "delay-sweep": _delay,
    "transit-report": _transit,
    "fit-regression": _regression,
    "fit-spectrum": _fit_spectrum,
}


def plot_table(table: Table, path):
    """Render ``table`` to a PNG at ``path``."""
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    PLOTTERS[table.kind](ax, table)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize=7)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path
