"""Element data and published reference values for K to Zn.

Reference energies are in hartree.  ``MINIMAL`` rows list the model term,
the experimental term, the subspace dimension and the CI / experimental /
multi-determinant Hartree-Fock energies.  ``EXTENDED`` rows list, per 4s
occupation, the term, dimension, CI energy and the exponent row
``Z_1s ... Z_4d`` (``None`` where the subshell carries no electrons).
Experimental and Hartree-Fock values are for display only.
"""

from __future__ import annotations

from dataclasses import dataclass

SYMBOLS = ("K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn")
CHARGE = {s: 19 + k for k, s in enumerate(SYMBOLS)}

EXTENDED_SUBSHELLS = ("1s", "2s", "2p", "3s", "3p", "3d", "4s", "4p", "4d")


@dataclass(frozen=True)
class MinimalRow:
    term: str
    exp_term: str
    dim: int
    energy: float
    exp_energy: float | None
    mdhf_energy: float


@dataclass(frozen=True)
class ExtendedRow:
    term: str
    s_occupation: int
    dim: int
    energy: float
    exponents: tuple


MINIMAL = {
    "K": MinimalRow("2S", "2S", 1, -596.7993, -601.9337, -599.16478),
    "Ca": MinimalRow("1S", "1S", 2, -674.2442, -680.1920, -676.75818),
    "Sc": MinimalRow("2D", "2D", 4, -756.8908, -763.8673, -759.73571),
    "Ti": MinimalRow("3F", "3F", 5, -845.1599, -853.3503, -848.40599),
    "V": MinimalRow("4F", "4F", 4, -939.1657, -948.8394, -942.88433),
    "Cr": MinimalRow("5D", "7S", 3, -1039.0409, -1050.4914, -1043.3563),
    "Mn": MinimalRow("6S", "6S", 1, -1144.9715, -1158.2670, -1149.8662),
    "Fe": MinimalRow("5D", "5D", 1, -1256.7813, -1271.6930, -1262.4436),
    "Co": MinimalRow("4F", "4F", 2, -1374.8903, -1393.3526, -1381.4145),
    "Ni": MinimalRow("3F", "3F", 1, -1499.3759, -1520.6907, -1506.8709),
    "Cu": MinimalRow("2D", "2S", 1, -1630.3692, -1655.1317, -1638.9637),
    "Zn": MinimalRow("1S", "1S", 1, -1768.0729, None, -1777.8481),
}

EXTENDED = {
    "Ca": (
        ExtendedRow("3D", 1, 2, -674.1634, (19.68, 17.41, 16.13, 12.05, 10.38, 2.83, 5.43, None, 2.46)),
        ExtendedRow("1S", 2, 1, -674.2442, (19.68, 17.41, 16.13, 12.10, 10.38, None, 5.03, None, None)),
    ),
    "Sc": (
        ExtendedRow("4F", 1, 3, -756.9381, (20.68, 18.42, 17.15, 12.99, 11.30, 8.26, 5.35, None, 6.24)),
        ExtendedRow("2D", 2, 2, -756.9968, (20.68, 18.42, 17.15, 13.06, 11.34, 10.07, 5.31, None, 8.46)),
    ),
    "Ti": (
        ExtendedRow("5F", 1, 8, -845.3714, (21.68, 19.43, 18.16, 13.89, 12.18, 9.91, 5.51, 1.45, 7.75)),
        ExtendedRow("3F", 2, 3, -845.4210, (21.68, 19.43, 18.16, 13.98, 12.23, 11.30, 5.52, None, 9.67)),
    ),
    "V": (
        ExtendedRow("6D", 1, 17, -939.5952, (22.68, 20.44, 19.17, 14.78, 13.04, 11.20, 5.61, 1.88, 8.93)),
        ExtendedRow("4F", 2, 8, -939.6375, (22.68, 20.44, 19.17, 14.86, 13.10, 12.36, 5.70, 5.25, 10.62)),
    ),
    "Cr": (
        ExtendedRow("7S", 1, 14, -1039.7864, (23.68, 21.44, 20.18, 15.64, 13.89, 12.37, 5.67, 9.51, 10.00)),
        ExtendedRow("5D", 2, 17, -1039.7852, (23.68, 21.44, 20.18, 15.74, 13.95, 13.36, 5.87, 0.93, 11.49)),
    ),
}

# amplitudes of the Cr 7S (4s1) ground state per active configuration; repeated
# terms are listed per block
CR_AMPLITUDES = {
    "3d5": (0.36,),
    "3d4 4d1": (0.63,),
    "3d3 4p2": (0.056,),
    "3d3 4d2": (0.31, 0.50),
    "3d2 4p2 4d1": (0.036, 0.038),
    "3d2 4d3": (0.17, 0.28),
    "3d1 4p2 4d2": (0.016, 0.014),
    "3d1 4d4": (0.096,),
    "4p2 4d3": (0.0036,),
    "4d5": (0.012,),
}


def preset(name: str) -> dict:
    """Exponent preset ``'<El>-4s<k>'`` as ``{subshell label: Z}`` (missing entries omitted)."""
    try:
        el, occ = name.split("-4s")
        row = next(r for r in EXTENDED[el] if r.s_occupation == int(occ))
    except (ValueError, KeyError, StopIteration):
        raise KeyError(f"unknown exponent preset {name!r}; known: {preset_names()}") from None
    return {s: z for s, z in zip(EXTENDED_SUBSHELLS, row.exponents) if z is not None}


def preset_names() -> list[str]:
    return [f"{el}-4s{r.s_occupation}" for el, rows in EXTENDED.items() for r in rows]


def default_preset(symbol: str, s_occupation: int) -> str | None:
    """Name of the exponent preset matching an element and 4s occupation, if any."""
    name = f"{symbol}-4s{s_occupation}"
    return name if name in preset_names() else None
