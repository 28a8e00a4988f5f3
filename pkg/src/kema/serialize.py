"""Lossless model serialization to a single self-describing JSON document.

Float arrays are stored as base64-encoded little-endian float64 buffers plus a
shape, so round-trips preserve every bit. The schema is documented in
docs/model_schema.md.
"""

import base64
import json

import numpy as np

from .align import AlignmentModel
from .exceptions import DataError
from .graphs import GraphConfig
from .kernels import KernelSpec

SCHEMA_VERSION = 1


def encode_array(a):
    a = np.ascontiguousarray(np.asarray(a, dtype="<f8"))
    return {
        "shape": list(a.shape),
        "data": base64.b64encode(a.tobytes()).decode("ascii"),
    }


def decode_array(obj):
    buf = base64.b64decode(obj["data"])
    return np.frombuffer(buf, dtype="<f8").reshape(obj["shape"]).copy()


def _kernel_to_dict(spec):
    out = {"kind": spec.kind}
    if spec.sigma is not None:
        out["sigma"] = spec.sigma
    if spec.matrix is not None:
        out["matrix"] = encode_array(spec.matrix)
    return out


def _kernel_from_dict(obj):
    return KernelSpec(
        kind=obj["kind"],
        sigma=obj.get("sigma"),
        matrix=decode_array(obj["matrix"]) if "matrix" in obj else None,
    )


def model_to_dict(model):
    out = {
        "schema_version": SCHEMA_VERSION,
        "mode": model.mode,
        "mu": model.mu,
        "eig_reg": model.eig_reg,
        "fit_residual": model.fit_residual,
        "domain_ids": list(model.domain_ids),
        "dims": [int(d) for d in model.dims],
        "eigenvalues": encode_array(model.eigenvalues),
        "coefs": [encode_array(c) for c in model.coefs],
        "kernels": [_kernel_to_dict(k) for k in model.kernels],
        "graph": {
            "k": model.graph_cfg.k,
            "weighting": model.graph_cfg.weighting,
            "sigma": model.graph_cfg.sigma,
            "normalized": model.graph_cfg.normalized,
        },
    }
    if model.training is not None:
        out["training"] = [encode_array(t) for t in model.training]
    if model.representatives is not None:
        out["representatives"] = [list(map(int, r)) for r in model.representatives]
    return out


def model_from_dict(obj):
    if obj.get("schema_version") != SCHEMA_VERSION:
        raise DataError(f"unsupported model schema version {obj.get('schema_version')}")
    g = obj["graph"]
    return AlignmentModel(
        mode=obj["mode"],
        coefs=[decode_array(c) for c in obj["coefs"]],
        eigenvalues=decode_array(obj["eigenvalues"]),
        kernels=[_kernel_from_dict(k) for k in obj["kernels"]],
        domain_ids=list(obj["domain_ids"]),
        dims=list(obj["dims"]),
        training=[decode_array(t) for t in obj["training"]] if "training" in obj else None,
        representatives=obj.get("representatives"),
        mu=obj["mu"],
        graph_cfg=GraphConfig(
            k=g["k"],
            weighting=g["weighting"],
            sigma=g["sigma"],
            normalized=g["normalized"],
        ),
        eig_reg=obj["eig_reg"],
        fit_residual=obj["fit_residual"],
    )


def save_model(path, model):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(model_to_dict(model), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_model(path):
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


def save_error_curves(path, curves):
    """CSV with header method,target_domain,n_features,error."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("method,target_domain,n_features,error\n")
        for curve in curves:
            for method, target, nf, err in curve.rows():
                fh.write(f"{method},{target},{nf},{repr(float(err))}\n")


def load_precomputed_kernel_csv(path):
    """Square symmetric Gram matrix from a headerless CSV of floats."""
    M = np.loadtxt(path, delimiter=",", ndmin=2)
    return KernelSpec(kind="precomputed", matrix=M)
