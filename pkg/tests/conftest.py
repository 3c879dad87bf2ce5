import itertools

import numpy as np
import pytest

from shelldyn import (Interaction, KernelKind, LogNormalShellProfile, Regime, Scenario,
                      Symmetry, UniformProfile)

ALL_KINDS = [
    KernelKind(i, s, r)
    for i, s, r in itertools.product(Interaction, Symmetry, Regime)
]

EM, GRAV = Interaction.EM, Interaction.GRAVITY
SPH, CYL = Symmetry.SPHERE, Symmetry.CYLINDER
REL, CL = Regime.RELATIVISTIC, Regime.CLASSICAL


def scenario_for(kind_or_interaction, symmetry=None, regime=None, **kw):
    if symmetry is None:
        k = kind_or_interaction
        return Scenario(k.interaction, k.symmetry, k.regime, **kw)
    return Scenario(kind_or_interaction, symmetry, regime, **kw)


def nice_profile(interaction, symmetry, shell=False):
    """Profiles with O(1) relativistic parameters that keep gravity quasi-relativistic."""
    if interaction is EM:
        if shell:
            return LogNormalShellProfile(f0=3.5, tau=2.0, mu_r=0.0, sigma_r=0.2)
        return UniformProfile(rho0=1.5 if symmetry is SPH else 1.0, r_max=1.0)
    if shell:
        return LogNormalShellProfile(f0=0.45, tau=2.0, mu_r=0.0, sigma_r=0.2)
    # eta^2(r) = r^2/2 for the sphere; moderate beta_bar^2 for the cylinder
    return UniformProfile(rho0=3.0 / (8.0 * np.pi) if symmetry is SPH else 0.3, r_max=1.0)


def sample_xy(kind, rng, n):
    """Random in-domain (x, y) pairs for a kernel kind."""
    if kind.relativistic:
        if kind.interaction is GRAV and kind.symmetry is SPH:
            ys = rng.uniform(1e-6, 0.97, n)
        else:
            ys = 10.0 ** rng.uniform(-6, 0.7, n)
    else:
        ys = np.zeros(n)
    if kind.expanding:
        xs = 1.0 + 10.0 ** rng.uniform(-6, 2, n)
    else:
        xs = 10.0 ** rng.uniform(-3, 0, n) * 0.999
    return xs, ys


def richardson_derivative(f, x, h):
    """Five-point Richardson-extrapolated centered first derivative."""
    d1 = (f(x + h) - f(x - h)) / (2.0 * h)
    d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h
    return (4.0 * d2 - d1) / 3.0


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
