"""Benchmark values (in percent) for the zero-vanna experiment.

Model: sigma0 = 20%, exposures at ``T - t`` in {0.5, 1, 2} and ``tau - T`` in
{0.5, 1, 2}, simulated with 250 steps per year and ten million paths.
Cells are listed in ``COLUMNS`` order.
"""

COLUMNS = [
    (0.5, 0.5), (0.5, 1.0), (0.5, 2.0),
    (1.0, 0.5), (1.0, 1.0), (1.0, 2.0),
    (2.0, 0.5), (2.0, 1.0), (2.0, 2.0),
]
HURSTS = (0.05, 0.1, 0.3)
QUANTITIES = ("Ev", "I_khat", "ATMI", "diff_khat", "diff_atm")

# keyed by (rho, alpha); values per (H, quantity)
BENCHMARKS = {
    (0.0, 0.8): {
        (0.05, 'Ev'): [19.58, 19.62, 19.65, 19.5, 19.55, 19.59, 19.4, 19.46, 19.52],
        (0.05, 'I_khat'): [19.57, 19.62, 19.64, 19.49, 19.55, 19.59, 19.4, 19.46, 19.51],
        (0.05, 'ATMI'): [19.57, 19.62, 19.64, 19.49, 19.55, 19.58, 19.4, 19.45, 19.5],
        (0.05, 'diff_khat'): [0.0, 0.0, 0.0, 0.0, 0.0, -0.01, 0.0, 0.0, -0.01],
        (0.05, 'diff_atm'): [0.0, 0.0, -0.01, 0.0, 0.0, -0.01, 0.0, -0.01, -0.02],
        (0.1, 'Ev'): [19.32, 19.36, 19.38, 19.16, 19.23, 19.27, 18.97, 19.04, 19.11],
        (0.1, 'I_khat'): [19.32, 19.36, 19.37, 19.16, 19.23, 19.26, 18.97, 19.04, 19.1],
        (0.1, 'ATMI'): [19.32, 19.36, 19.36, 19.16, 19.22, 19.25, 18.96, 19.03, 19.09],
        (0.1, 'diff_khat'): [0.0, 0.0, 0.0, 0.0, 0.0, -0.01, 0.0, -0.01, -0.01],
        (0.1, 'diff_atm'): [-0.01, 0.0, -0.01, -0.01, -0.01, -0.02, 0.0, -0.01, -0.03],
        (0.3, 'Ev'): [18.97, 18.88, 18.69, 18.52, 18.46, 18.32, 17.81, 17.79, 17.71],
        (0.3, 'I_khat'): [18.97, 18.88, 18.69, 18.51, 18.46, 18.31, 17.81, 17.78, 17.69],
        (0.3, 'ATMI'): [18.97, 18.87, 18.67, 18.51, 18.44, 18.28, 17.8, 17.76, 17.65],
        (0.3, 'diff_khat'): [0.0, 0.0, 0.0, 0.0, -0.01, -0.01, 0.0, -0.01, -0.02],
        (0.3, 'diff_atm'): [-0.01, -0.01, -0.03, -0.01, -0.02, -0.04, -0.01, -0.03, -0.06],
    },
    (-0.8, 0.8): {
        (0.05, 'Ev'): [19.58, 19.62, 19.65, 19.5, 19.55, 19.59, 19.4, 19.46, 19.52],
        (0.05, 'I_khat'): [19.45, 19.48, 19.5, 19.37, 19.42, 19.45, 19.27, 19.33, 19.37],
        (0.05, 'ATMI'): [19.3, 19.27, 19.19, 19.23, 19.21, 19.14, 19.13, 19.12, 19.06],
        (0.05, 'diff_khat'): [-0.13, -0.13, -0.14, -0.12, -0.13, -0.15, -0.12, -0.13, -0.15],
        (0.05, 'diff_atm'): [-0.27, -0.35, -0.46, -0.27, -0.34, -0.46, -0.27, -0.35, -0.46],
        (0.1, 'Ev'): [19.32, 19.36, 19.38, 19.16, 19.23, 19.27, 18.97, 19.04, 19.11],
        (0.1, 'I_khat'): [19.13, 19.14, 19.13, 18.98, 19.02, 19.02, 18.78, 18.82, 18.85],
        (0.1, 'ATMI'): [18.96, 18.88, 18.73, 18.81, 18.76, 18.62, 18.61, 18.57, 18.46],
        (0.1, 'diff_khat'): [-0.19, -0.22, -0.25, -0.18, -0.21, -0.25, -0.19, -0.22, -0.26],
        (0.1, 'diff_atm'): [-0.36, -0.48, -0.64, -0.36, -0.47, -0.64, -0.36, -0.48, -0.65],
        (0.3, 'Ev'): [18.97, 18.88, 18.69, 18.52, 18.46, 18.32, 17.81, 17.79, 17.71],
        (0.3, 'I_khat'): [18.77, 18.58, 18.24, 18.32, 18.16, 17.86, 17.61, 17.47, 17.23],
        (0.3, 'ATMI'): [18.6, 18.29, 17.77, 18.15, 17.88, 17.4, 17.45, 17.21, 16.79],
        (0.3, 'diff_khat'): [-0.2, -0.3, -0.45, -0.2, -0.3, -0.46, -0.21, -0.32, -0.48],
        (0.3, 'diff_atm'): [-0.37, -0.59, -0.93, -0.36, -0.58, -0.92, -0.36, -0.58, -0.92],
    },
    (0.0, 2.0): {
        (0.05, 'Ev'): [17.31, 17.57, 17.74, 16.86, 17.2, 17.44, 16.35, 16.72, 17.04],
        (0.05, 'I_khat'): [17.3, 17.57, 17.73, 16.85, 17.19, 17.42, 16.34, 16.7, 17.01],
        (0.05, 'ATMI'): [17.29, 17.55, 17.7, 16.84, 17.17, 17.38, 16.33, 16.67, 16.97],
        (0.05, 'diff_khat'): [-0.01, 0.0, -0.01, -0.01, -0.01, -0.03, 0.0, -0.02, -0.03],
        (0.05, 'diff_atm'): [-0.02, -0.02, -0.05, -0.02, -0.03, -0.07, -0.02, -0.04, -0.08],
        (0.1, 'Ev'): [15.99, 16.17, 16.23, 15.18, 15.48, 15.66, 14.22, 14.58, 14.88],
        (0.1, 'I_khat'): [15.98, 16.16, 16.2, 15.16, 15.45, 15.6, 14.21, 14.53, 14.8],
        (0.1, 'ATMI'): [15.96, 16.13, 16.14, 15.15, 15.42, 15.54, 14.19, 14.5, 14.74],
        (0.1, 'diff_khat'): [-0.01, -0.01, -0.03, -0.02, -0.02, -0.06, -0.02, -0.04, -0.07],
        (0.1, 'diff_atm'): [-0.03, -0.04, -0.09, -0.03, -0.05, -0.11, -0.03, -0.08, -0.13],
        (0.3, 'Ev'): [14.35, 13.9, 13.09, 12.32, 12.07, 11.5, 9.67, 9.57, 9.26],
        (0.3, 'I_khat'): [14.33, 13.86, 12.97, 12.27, 11.99, 11.32, 9.6, 9.42, 9.02],
        (0.3, 'ATMI'): [14.31, 13.83, 12.91, 12.26, 11.95, 11.26, 9.58, 9.39, 8.97],
        (0.3, 'diff_khat'): [-0.02, -0.04, -0.13, -0.04, -0.09, -0.18, -0.07, -0.14, -0.24],
        (0.3, 'diff_atm'): [-0.04, -0.08, -0.18, -0.06, -0.12, -0.24, -0.09, -0.17, -0.29],
    },
    (-0.8, 2.0): {
        (0.05, 'Ev'): [17.31, 17.57, 17.74, 16.86, 17.2, 17.44, 16.35, 16.72, 17.04],
        (0.05, 'I_khat'): [16.85, 17.07, 17.2, 16.41, 16.7, 16.89, 15.89, 16.22, 16.47],
        (0.05, 'ATMI'): [16.63, 16.74, 16.72, 16.19, 16.38, 16.42, 15.69, 15.92, 16.02],
        (0.05, 'diff_khat'): [-0.46, -0.5, -0.55, -0.45, -0.5, -0.55, -0.46, -0.5, -0.57],
        (0.05, 'diff_atm'): [-0.68, -0.83, -1.02, -0.66, -0.81, -1.02, -0.66, -0.8, -1.02],
        (0.1, 'Ev'): [15.99, 16.17, 16.23, 15.18, 15.48, 15.66, 14.22, 14.58, 14.88],
        (0.1, 'I_khat'): [15.23, 15.29, 15.22, 14.44, 14.61, 14.65, 13.48, 13.71, 13.85],
        (0.1, 'ATMI'): [14.99, 14.93, 14.69, 14.21, 14.27, 14.15, 13.29, 13.41, 13.4],
        (0.1, 'diff_khat'): [-0.76, -0.88, -1.01, -0.75, -0.87, -1.01, -0.74, -0.86, -1.03],
        (0.1, 'diff_atm'): [-1.0, -1.24, -1.53, -0.97, -1.2, -1.51, -0.93, -1.17, -1.48],
        (0.3, 'Ev'): [14.35, 13.9, 13.09, 12.32, 12.07, 11.5, 9.67, 9.57, 9.26],
        (0.3, 'I_khat'): [13.45, 12.65, 11.45, 11.47, 10.89, 9.94, 8.91, 8.5, 7.86],
        (0.3, 'ATMI'): [13.24, 12.34, 11.04, 11.31, 10.66, 9.62, 8.81, 8.35, 7.65],
        (0.3, 'diff_khat'): [-0.9, -1.25, -1.65, -0.84, -1.18, -1.56, -0.76, -1.06, -1.4],
        (0.3, 'diff_atm'): [-1.11, -1.56, -2.05, -1.0, -1.42, -1.88, -0.86, -1.21, -1.61],
    },
}


def benchmark(rho: float, alpha: float, H: float, T_minus_t: float, tau_minus_T: float, quantity: str):
    """Benchmark value as a decimal, or ``None`` when the cell is not tabulated."""
    table = BENCHMARKS.get((float(rho), float(alpha)))
    if table is None or (float(H), quantity) not in table:
        return None
    try:
        col = COLUMNS.index((float(T_minus_t), float(tau_minus_T)))
    except ValueError:
        return None
    return table[(float(H), quantity)][col] / 100.0
