"""
Saturation ceilings and the onset of saturation
===============================================

The growth law ``dphi/dt = lam * phi * (1 - eta * phi**alpha)`` has a closed
form whose bracket holds two terms: a constant ``eta`` and a decaying
transient. The ceiling is ``eta**(-1/alpha)`` and the onset timescale is
where the two terms are equal.
"""
import numpy as np

from satgrowth import (
    GrowthParams,
    SolutionSpec,
    bracket_terms,
    closed_form,
    constant_from_initial,
    nonlinear_timescale,
    saturation_value,
)

# annual revenue (millions of dollars) and headcount parameter sets
annual = GrowthParams(alpha=1.0, lam=0.145, eta=1e-5)
headcount = GrowthParams(alpha=1.0, lam=0.09, eta=2e-6)
print(f"annual revenue ceiling: {saturation_value(annual):.6g} million dollars")
print(f"headcount ceiling:      {saturation_value(headcount):.6g} people")

###############################################################################
# Cumulative revenue starting from one million dollars. The integration
# constant ``c`` is solved from the starting value.
cumulative = GrowthParams(alpha=1.0, lam=0.15, eta=5e-7)
spec = SolutionSpec(cumulative, constant_from_initial(cumulative, 1.0, 0.0), t_origin=1914.0)
t_nl = nonlinear_timescale(spec)
eta_term, transient = bracket_terms(spec, t_nl)
print(f"c = {spec.c:.9g}, t_nl = {t_nl:.2f} years (calendar {1914 + t_nl:.1f})")
print(f"bracket terms at t_nl: eta = {eta_term:.6e}, transient = {transient:.6e}")

###############################################################################
# Sweep the starting value: each decade of c moves t_nl earlier by ln(10) / lam
for phi0 in (1.0, 10.0, 30.0):
    s = SolutionSpec(cumulative, constant_from_initial(cumulative, phi0, 0.0))
    print(f"phi(0) = {phi0:5.1f}  ->  t_nl = {nonlinear_timescale(s):6.2f} years")

###############################################################################
# The curve itself, as a fraction of the ceiling
t = np.arange(0, 161, 20.0)
frac = closed_form(spec, t) / saturation_value(cumulative)
for ti, f in zip(t, frac):
    print(f"t = {ti:5.0f}   phi/phi_sat = {f:.3e}")
