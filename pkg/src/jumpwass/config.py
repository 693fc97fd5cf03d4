"""JSON system descriptions.

Schema::

    {
      "modes": [n x n row-major arrays, one per mode],
      "jump": {"kind": "iid", "pi": [...]}
            | {"kind": "markov", "pi0": [...], "transition": [[...]]}
            | {"kind": "semi_markov", "pi0": [...], "kernel": [[[q_ij(1..K)]]]},
      "initial": {"weights": [...], "means": [[...]], "covariances": [[[...]]]},
      "ncs": {"plant": [[...]], "input": [...], "gains": {"tau,d": [...]},
              "tau_max": int, "d_max": int, "sample_time": float}
    }

Exactly one of ``modes`` and ``ncs`` must be present. With ``ncs`` the
initial density is given in plant coordinates and lifted with a constant
history.
"""

import json

import numpy as np

from .exceptions import ConfigError, DimensionMismatch, JumpWassError, NotPSD, NotStochastic
from .gaussian_mixture import GaussianMixture
from .jump_process import IIDProcess, MarkovProcess, SemiMarkovProcess
from .model_builder import DelayedNCS, augment
from .numerics import validate_stochastic
from .propagation import SJLS


def _array(doc, key, path, ndim):
    if key not in doc:
        raise ConfigError(f"{path}.{key}".lstrip("."), "missing required field")
    try:
        a = np.array(doc[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}.{key}".lstrip("."), f"not a numeric array ({exc})") from None
    if a.ndim != ndim:
        raise ConfigError(f"{path}.{key}".lstrip("."), f"expected a {ndim}-d array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ConfigError(f"{path}.{key}".lstrip("."), "entries must be finite")
    return a


def _jump(doc):
    if not isinstance(doc, dict):
        raise ConfigError("jump", "must be an object")
    kind = doc.get("kind")
    try:
        if kind == "iid":
            return IIDProcess(_array(doc, "pi", "jump", 1))
        if kind == "markov":
            p = _array(doc, "transition", "jump", 2)
            v = validate_stochastic(p)
            if v is not None:
                raise ConfigError("jump.transition", f"row {v.row}: {v.reason}")
            return MarkovProcess(p, _array(doc, "pi0", "jump", 1))
        if kind == "semi_markov":
            return SemiMarkovProcess(_array(doc, "kernel", "jump", 3), _array(doc, "pi0", "jump", 1))
    except ConfigError:
        raise
    except NotStochastic as exc:
        raise ConfigError("jump.transition", str(exc)) from None
    except JumpWassError as exc:
        raise ConfigError("jump", str(exc)) from None
    raise ConfigError("jump.kind", f"must be 'iid', 'markov' or 'semi_markov', got {kind!r}")


def _initial(doc):
    if not isinstance(doc, dict):
        raise ConfigError("initial", "must be an object")
    w = _array(doc, "weights", "initial", 1)
    means = _array(doc, "means", "initial", 2)
    covs = _array(doc, "covariances", "initial", 3)
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ConfigError("initial.weights", f"must be nonnegative and sum to 1, got sum {w.sum():.15g}")
    try:
        return GaussianMixture(w, means, covs)
    except NotPSD as exc:
        # Kept as NotPSD so the CLI reports it as a numerical failure.
        raise NotPSD(f"initial.covariances: {exc}") from None
    except JumpWassError as exc:
        raise ConfigError("initial", str(exc)) from None


def _ncs(doc):
    try:
        gains = {}
        for key, row in doc["gains"].items():
            tau, d = (int(p) for p in key.split(","))
            gains[(tau, d)] = np.array(row, dtype=float)
        return DelayedNCS(
            _array(doc, "plant", "ncs", 2),
            _array(doc, "input", "ncs", 1),
            gains,
            tau_max=int(doc["tau_max"]),
            d_max=int(doc["d_max"]),
            sample_time=float(doc.get("sample_time", 0.1)),
        )
    except KeyError as exc:
        raise ConfigError(f"ncs.{exc.args[0]}", "missing required field") from None
    except (ValueError, AttributeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("ncs", str(exc)) from None


def parse_system(doc):
    """Build ``(SJLS, GaussianMixture)`` from a decoded JSON document."""
    if not isinstance(doc, dict):
        raise ConfigError("<document>", "top level must be an object")
    if ("modes" in doc) == ("ncs" in doc):
        raise ConfigError("modes", "exactly one of 'modes' and 'ncs' is required")
    jump = _jump(doc.get("jump"))
    rho0 = _initial(doc.get("initial"))
    try:
        if "ncs" in doc:
            sys = augment(_ncs(doc["ncs"]), jump)
            if rho0.dim != sys.plant_dim:
                raise ConfigError("initial.means", f"dimension {rho0.dim} does not match plant dimension {sys.plant_dim}")
            return sys, sys.lift(rho0)
        modes = _array(doc, "modes", "", 3)
        sys = SJLS(modes, jump)
    except DimensionMismatch as exc:
        raise ConfigError("modes", str(exc)) from None
    if rho0.dim != sys.dim:
        raise ConfigError("initial.means", f"dimension {rho0.dim} does not match state dimension {sys.dim}")
    return sys, rho0


def load_system(path):
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"<document> line {exc.lineno} column {exc.colno}", exc.msg) from None
    return parse_system(doc)


def _jump_doc(jump):
    if isinstance(jump, IIDProcess):
        return {"kind": "iid", "pi": jump.pi.tolist()}
    if isinstance(jump, MarkovProcess):
        return {"kind": "markov", "pi0": jump.pi0.tolist(), "transition": jump.transition.tolist()}
    if isinstance(jump, SemiMarkovProcess):
        return {"kind": "semi_markov", "pi0": jump.pi0.tolist(), "kernel": jump.kernel.tolist()}
    raise TypeError(f"cannot serialize {type(jump).__name__}")


def system_to_dict(sys, rho0):
    """Explicit-modes document; augmented systems are written in stacked form."""
    return {
        "modes": sys.modes.tolist(),
        "jump": _jump_doc(sys.jump),
        "initial": {
            "weights": rho0.weights.tolist(),
            "means": rho0.means.tolist(),
            "covariances": rho0.covs.tolist(),
        },
    }


def dump_system(sys, rho0, path):
    with open(path, "w") as fh:
        json.dump(system_to_dict(sys, rho0), fh, indent=1)
