"""Reproducible experiment orchestration.

An experiment is a strict JSON document binding a model, parameter blocks, an
integrator configuration, a seed, and a list of diagnostics. Running one
writes a manifest (the fully resolved spec plus the package version), CSV/JSON
outputs, and a verdicts file for every diagnostic that carries a pass/fail
contract. Nothing reads wall-clock time or machine entropy: identical specs
produce byte-identical outputs.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import analytics, diagnostics, limits, micro, model_core, sde
from .errors import ConfigError, NonFiniteState, QuadratureFailure

EXIT_OK = 0
EXIT_VERDICT_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_ERROR = 3

OUTPUT_ROOT_ENV = "ALTSIM_OUT"

_MODELS = ("micro", "wf", "meanfield", "mckean_vlasov", "frozen_theta", "single_colony", "analytics_only")

_TOP_KEYS = {"name", "model", "params", "integrator", "replicas", "seed", "x0", "diagnostics", "output_dir"}
_PARAM_KEYS = {"ecology", "scaling", "schedule", "graph", "wf", "theta", "D"}
_INTEGRATOR_KEYS = {"dt", "t_end", "record_stride", "boundary_policy", "floor_eps"}
_SCHEDULE_KEYS = {"kappa", "alpha", "beta_target", "iota_floor", "N", "slow_du"}


def _reject_unknown(block: dict, allowed: set, where: str) -> None:
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


@dataclass
class ExperimentSpec:
    """Validated experiment description (resolved, JSON-serializable)."""

    name: str
    model: str
    seed: int
    replicas: int
    doc: dict = field(repr=False)

    @classmethod
    def from_dict(cls, doc) -> "ExperimentSpec":
        if not isinstance(doc, dict):
            raise ConfigError("experiment spec must be a JSON object")
        if "spec" in doc:  # manifest round-trip: rerun from the resolved spec
            doc = doc["spec"]
        _reject_unknown(doc, _TOP_KEYS, "experiment spec")
        for key in ("name", "model", "seed"):
            if key not in doc:
                raise ConfigError(f'experiment spec requires "{key}"')
        if not isinstance(doc["seed"], int):
            raise ConfigError('"seed" must be an integer (no wall-clock defaults)')
        if doc["model"] not in _MODELS:
            raise ConfigError(f'unknown model {doc["model"]!r}; choose from {_MODELS}')
        params = doc.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError('"params" must be an object')
        _reject_unknown(params, _PARAM_KEYS, '"params"')
        integ = doc.get("integrator", {})
        _reject_unknown(integ, _INTEGRATOR_KEYS, '"integrator"')
        if "schedule" in params:
            _reject_unknown(params["schedule"], _SCHEDULE_KEYS, '"schedule"')
        replicas = doc.get("replicas", 1)
        if not isinstance(replicas, int) or replicas < 1:
            raise ConfigError('"replicas" must be a positive integer')
        return cls(name=str(doc["name"]), model=doc["model"], seed=doc["seed"], replicas=replicas, doc=doc)

    @property
    def diagnostics(self) -> list:
        diags = self.doc.get("diagnostics", [])
        if not isinstance(diags, list):
            raise ConfigError('"diagnostics" must be a list')
        return diags

    def integrator_config(self) -> sde.IntegratorConfig:
        return sde.IntegratorConfig(**self.doc.get("integrator", {}))

    def wf_params(self) -> limits.WfParams:
        block = self.doc.get("params", {}).get("wf")
        if block is None:
            raise ConfigError(f'model {self.model!r} requires params.wf')
        _reject_unknown(block, {"kappa", "alpha", "beta", "a"}, '"wf"')
        try:
            return limits.WfParams(**{k: float(v) for k, v in block.items()})
        except (TypeError, ValueError) as exc:
            raise ConfigError(f'invalid "wf": {exc}') from exc


def _freq_x0(spec: ExperimentSpec, dim: int):
    block = spec.doc.get("x0", {"X0": 0.5})
    _reject_unknown(block, {"X0", "uniform"}, '"x0"')
    if "uniform" in block:
        lo, hi = (float(v) for v in block["uniform"])

        def sampler(rng, r):
            return rng.uniform(lo, hi, size=dim)

        return sampler
    x0 = np.broadcast_to(np.asarray(block["X0"], dtype=float), (dim,)).copy()
    if np.any((x0 < 0) | (x0 > 1)):
        raise ConfigError("frequencies must lie in [0, 1]")
    return x0


def _micro_blocks(spec: ExperimentSpec):
    params = spec.doc.get("params", {})
    bundle = model_core.parse_params({k: params[k] for k in ("ecology", "scaling", "graph") if k in params})
    if bundle.ecology is None:
        raise ConfigError("micro model requires params.ecology")
    graph = bundle.graph or model_core.build_deme_graph("single")
    schedule = None
    if "schedule" in params:
        blk = params["schedule"]
        for key in ("kappa", "alpha", "beta_target", "N"):
            if key not in blk:
                raise ConfigError(f'"schedule" requires "{key}"')
        schedule = micro.ScalingSchedule(
            bundle.ecology,
            kappa=float(blk["kappa"]),
            alpha=float(blk["alpha"]),
            beta_target=float(blk["beta_target"]),
            iota_floor=float(blk.get("iota_floor", 0.05)),
        ), int(blk["N"])
    elif bundle.scaling is None:
        raise ConfigError("micro model requires params.scaling or params.schedule")
    return bundle.ecology, bundle.scaling, graph, schedule


def _micro_x0(spec: ExperimentSpec, ecology, graph) -> micro.HfpState:
    block = spec.doc.get("x0", {"F0": 0.5, "at_equilibrium": True})
    _reject_unknown(block, {"F0", "H0", "P0", "at_equilibrium"}, '"x0"')
    d = graph.n_demes
    f0 = np.broadcast_to(np.asarray(block.get("F0", 0.5), dtype=float), (d,)).copy()
    if block.get("at_equilibrium", "H0" not in block):
        return micro.equilibrium_hfp_state(ecology, graph, f0)
    h0 = np.broadcast_to(np.asarray(block["H0"], dtype=float), (d,)).copy()
    p0 = np.broadcast_to(np.asarray(block.get("P0", 0.0), dtype=float), (d,)).copy()
    return micro.HfpState(H=h0, F=f0, P=p0)


class _Outputs:
    def __init__(self, out_dir: str):
        self.dir = out_dir
        self.files: list[str] = []
        self.verdicts: list[dict] = []

    def path(self, filename: str) -> str:
        self.files.append(filename)
        return os.path.join(self.dir, filename)

    def add_verdict(self, name: str, passed: bool, **details) -> None:
        self.verdicts.append({"name": name, "passed": bool(passed), **details})

    def write_json(self, filename: str, doc: dict) -> None:
        sde.atomic_write_text(self.path(filename), json.dumps(doc, indent=1, sort_keys=True))


def _run_model_experiment(spec: ExperimentSpec, out: _Outputs) -> None:
    cfg = spec.integrator_config()
    diags = spec.diagnostics
    reducers = []
    for dg in diags:
        if dg.get("kind") == "histogram":
            reducers.append(sde.HistogramReducer(bins=int(dg.get("bins", 32))))

    if spec.model == "micro":
        ecology, scaling, graph, schedule = _micro_blocks(spec)
        x0 = _micro_x0(spec, ecology, graph)
        if schedule is not None:
            sched, n_level = schedule
            slow_du = float(spec.doc["params"]["schedule"].get("slow_du", 0.01))
            times, records = micro.rescaled_frequency_ensemble(
                ecology, sched, graph, n_level, cfg.t_end, cfg, spec.seed, x0,
                slow_du=slow_du, n_replicas=spec.replicas,
            )
            model = micro.hfp_model(ecology, sched.params_for(n_level), graph, cfg.floor_eps)
        else:
            model = micro.hfp_model(ecology, scaling, graph, cfg.floor_eps)
            times, records = sde.run_batch_records(model, x0.flat(), cfg, spec.seed, spec.replicas)
        _write_records(spec, out, times, records, model.names)
        for dg in diags:
            kind = dg.get("kind")
            if kind == "deviation":
                if schedule is None:
                    raise ConfigError('diagnostic "deviation" requires params.schedule')
                lc = sched.constants
                series = diagnostics.deviation_statistic(records, ecology, lc, graph, n_level, times=times)
                series.to_csv(out.path("deviation.csv"))
            elif kind == "moment_monitor":
                which = dg.get("which", "inv_H2")
                per_replica = np.stack(
                    [
                        diagnostics.moment_monitor(
                            sde.Path(times=times, states=records[:, r, :], names=model.names, meta={}),
                            ecology, graph, which,
                        )[1]
                        for r in range(records.shape[1])
                    ],
                    axis=1,
                )
                value = per_replica.mean(axis=1)
                stderr = (
                    per_replica.std(axis=1, ddof=1) / np.sqrt(per_replica.shape[1])
                    if per_replica.shape[1] > 1
                    else np.zeros_like(value)
                )
                sde.write_timeseries_csv(
                    out.path(f"monitor_{which}.csv"), times, np.column_stack([value, stderr]), ["value", "stderr"]
                )
            elif kind not in ("histogram",):
                raise ConfigError(f"unknown diagnostic {kind!r} for model 'micro'")
        return

    wp = spec.wf_params()
    params = spec.doc.get("params", {})
    if spec.model == "wf":
        bundle = model_core.parse_params({"graph": params["graph"]} if "graph" in params else {})
        graph = bundle.graph or model_core.build_deme_graph("single")
        model = limits.wf_spatial_model(wp, graph)
    elif spec.model in ("meanfield", "mckean_vlasov"):
        d = int(params.get("D", 1))
        model = limits.meanfield_model(wp, d)
    elif spec.model == "frozen_theta":
        if "theta" not in params:
            raise ConfigError("frozen_theta requires params.theta")
        model = limits.frozen_theta_model(wp, float(params["theta"]))
    else:
        model = limits.single_colony_model(wp)

    x0 = _freq_x0(spec, model.dim)
    times, records = sde.run_batch_records(model, x0, cfg, spec.seed, spec.replicas)
    _write_records(spec, out, times, records, model.names)

    for dg in diags:
        kind = dg.get("kind")
        if kind == "histogram":
            continue
        if kind == "monotone_moment":
            series = np.mean(1.0 / (wp.a - records), axis=2).T  # (R, n_rec)
            verdict = diagnostics.monotone_moment_check(times, series, wp)
            expected = {1: "NonDecreasing", 0: "Constant", -1: "NonIncreasing"}[int(np.sign(wp.beta - wp.alpha))]
            out.add_verdict(
                "monotone_moment", verdict.direction == expected,
                direction=verdict.direction, expected=expected,
                slope=verdict.slope, slope_stderr=verdict.slope_stderr,
            )
        elif kind == "ks_stationary":
            theta = float(dg.get("theta", params.get("theta", 0.0)))
            sm = analytics.StationaryModel(wp, theta)
            t_min = float(dg.get("t_min", 0.0))
            threshold = float(dg.get("threshold", 0.05))
            samples = records[times >= t_min, :, :].ravel()
            dist = diagnostics.ks_distance(samples, sm.table)
            out.add_verdict("ks_stationary", dist < threshold, ks_distance=dist, threshold=threshold)
        else:
            raise ConfigError(f"unknown diagnostic {kind!r} for model {spec.model!r}")


def _write_records(spec: ExperimentSpec, out: _Outputs, times, records, names) -> None:
    mean = records.mean(axis=1)
    var = records.var(axis=1, ddof=1) if records.shape[1] > 1 else np.zeros_like(mean)
    cols = [f"mean_{n}" for n in names] + [f"var_{n}" for n in names]
    sde.write_timeseries_csv(out.path("stats.csv"), times, np.hstack([mean, var]), cols)
    if spec.replicas == 1:
        sde.write_timeseries_csv(out.path("path.csv"), times, records[:, 0, :], list(names))


def _run_analytics_only(spec: ExperimentSpec, out: _Outputs) -> None:
    wp = spec.wf_params()
    results = {}
    for dg in spec.diagnostics:
        kind = dg.get("kind")
        if kind == "invasion_criterion":
            res = analytics.invasion_criterion(wp)
            results["invasion_criterion"] = res.to_json_dict()
        elif kind == "gamma_identity":
            theta = float(dg["theta"])
            resid = analytics.gamma_identity_residual(wp, theta)
            tol = float(dg.get("threshold", 1e-10))
            results["gamma_identity"] = {"theta": theta, "residual": resid}
            out.add_verdict("gamma_identity", abs(resid) < tol, residual=resid, threshold=tol)
        elif kind == "stationary_table":
            theta = float(dg["theta"])
            sm = analytics.StationaryModel(wp, theta)
            tab = sm.cdf_table(int(dg.get("n_cells", 10_000)))
            interior = slice(1, -1)
            dens = np.empty_like(tab.z)
            dens[0] = dens[-1] = np.nan
            dens[interior] = sm.density(tab.z[interior]) / sm.c_theta
            tab.to_csv(out.path("stationary.csv"), density=dens)
            results["stationary_table"] = {"theta": theta, "c_theta": sm.c_theta, "u": sm.u, "v": sm.v}
        elif kind == "fixation_classify":
            verdict = analytics.fixation_classify(wp, float(dg["mean_z0"]), dg.get("theta"))
            results["fixation_classify"] = {"kind": verdict.kind, "theta": verdict.theta}
        elif kind == "scale_function":
            zs = [float(z) for z in dg.get("z", [0.0, 0.25, 0.5, 0.75])]
            rows = [(z, *analytics.scale_function(wp, z)) for z in zs]
            results["scale_function"] = [{"z": z, "s": s, "S": S} for z, s, S in rows]
        else:
            raise ConfigError(f"unknown analytics diagnostic {kind!r}")
    out.write_json("analytics.json", results)


def resolve_output_dir(spec: ExperimentSpec, out_root: str | None) -> str:
    root = out_root or spec.doc.get("output_dir") or os.environ.get(OUTPUT_ROOT_ENV) or "altsim_out"
    return os.path.join(root, spec.name)


def run_experiment(spec_doc: dict, out_root: str | None = None, threads: int = 1) -> tuple[int, str]:
    """Run one experiment spec; returns (exit_code, output_directory).

    threads is accepted for interface compatibility; execution is
    single-threaded and outputs are identical for every value.
    """
    try:
        spec = ExperimentSpec.from_dict(spec_doc)
        out_dir = resolve_output_dir(spec, out_root)
        os.makedirs(out_dir, exist_ok=True)
        out = _Outputs(out_dir)
        if spec.model == "analytics_only":
            _run_analytics_only(spec, out)
        else:
            _run_model_experiment(spec, out)
    except ConfigError as exc:
        print(f"config error: {exc}")
        return EXIT_CONFIG_ERROR, ""
    except (NonFiniteState, QuadratureFailure) as exc:
        print(f"numerical failure: {exc}")
        return EXIT_NUMERICAL_ERROR, ""

    all_passed = all(v["passed"] for v in out.verdicts) if out.verdicts else True
    if out.verdicts:
        out.write_json("verdicts.json", {"verdicts": out.verdicts, "all_passed": all_passed})
    from . import __version__

    manifest = {"version": __version__, "spec": spec.doc, "outputs": sorted(out.files)}
    sde.atomic_write_text(os.path.join(out_dir, "manifest.json"), json.dumps(manifest, indent=1, sort_keys=True))
    return (EXIT_OK if all_passed else EXIT_VERDICT_FAILED), out_dir


def run_experiment_file(path: str, out_root: str | None = None, threads: int = 1) -> tuple[int, str]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: cannot read spec {path}: {exc}")
        return EXIT_CONFIG_ERROR, ""
    return run_experiment(doc, out_root=out_root, threads=threads)
