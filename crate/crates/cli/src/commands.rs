//! One function per command family.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use freebit_core::arena::{
    self, catalog, ClassifyConfig, GameConfig, PredictorSpec, ReferenceClass, Subject, SubjectSpec,
};
use freebit_core::bits::BitString;
use freebit_core::freestate::{
    clone_feasible, knightian_or, prob_mix, separating_witness, ClassicalFreestate, Effect, Freestate, Interval,
    PureState, WitnessOptions,
};
use freebit_core::gadgets::causal::{self, CausalGraph, ValidateOptions};
use freebit_core::gadgets::chsh::{self, QuantumStrategy};
use freebit_core::gadgets::newcomb::{self, Payoffs, Policy};
use freebit_core::gadgets::rooms::{self, RoomPuzzle};
use freebit_core::prior::{build_mixture, diagonal_sequence, omega_truncated, regret_report};
use freebit_core::soph::{ComplexityTable, SetListing, LISTING_OVERHEAD};
use freebit_core::toyvm::{MachineConfig, Program};

use crate::report::{CliError, Context, Output};
use crate::{ArenaCmd, FreestateCmd, GadgetsCmd, SolomonoffCmd, SophCmd};

type Done = Result<(String, Output), CliError>;

fn named(family: &str, cmd: &str, out: Output) -> Done {
    Ok((format!("{family} {cmd}"), out))
}

const INTERVAL_SCHEMA: &str = r#"{"classical": {"n": N, "generators": [[p0, p1, ...], ...]}, "event": [outcome, ...]}
or {"quantum": {"dim": D, "generators": [[[re, im], ...], ...]}, "effect": {"dim": D, "entries": [[re, im], ...]}}"#;
const WITNESS_SCHEMA: &str = r#"{"s1": FREESTATE, "s2": FREESTATE, "tol"?: 1e-6, "options"?: {"restarts": 64, "iterations": 200, "seed": 0}}"#;
const OR_SCHEMA: &str = r#"{"sets": [FREESTATE, ...]} or {"classical_sets": [CLASSICAL, ...]}"#;
const MIX_SCHEMA: &str = r#"{"components": [{"weight": w, "set": FREESTATE}, ...]} or {"classical_components": [{"weight": w, "set": CLASSICAL}, ...]}"#;
const CLONE_SCHEMA: &str = r#"{"psi": {"amplitudes": [[re, im], ...]}, "phi": {"amplitudes": [[re, im], ...]}}"#;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IntervalConfig {
    classical: Option<ClassicalFreestate>,
    event: Option<Vec<usize>>,
    quantum: Option<Freestate>,
    effect: Option<Effect>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessConfig {
    s1: Freestate,
    s2: Freestate,
    #[serde(default = "default_tol")]
    tol: f64,
    #[serde(default)]
    options: WitnessOptions,
}

fn default_tol() -> f64 {
    1e-6
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OrConfig {
    sets: Option<Vec<Freestate>>,
    classical_sets: Option<Vec<ClassicalFreestate>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Weighted<T> {
    weight: f64,
    set: T,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MixConfig {
    components: Option<Vec<Weighted<Freestate>>>,
    classical_components: Option<Vec<Weighted<ClassicalFreestate>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CloneConfig {
    psi: PureState,
    phi: PureState,
}

#[derive(Serialize)]
struct SetReport<T: Serialize> {
    freestate: T,
    generators: usize,
}

fn exactly_one<A, B>(a: Option<A>, b: Option<B>, schema: &'static str) -> Result<Result<A, B>, CliError> {
    match (a, b) {
        (Some(a), None) => Ok(Ok(a)),
        (None, Some(b)) => Ok(Err(b)),
        _ => Err(CliError::Config {
            message: "give exactly one of the two alternative forms".into(),
            schema,
        }),
    }
}

pub fn freestate(cmd: FreestateCmd, ctx: &Context) -> Done {
    match cmd {
        FreestateCmd::Interval => {
            let (c, _) = ctx.parse::<IntervalConfig>(INTERVAL_SCHEMA, None)?;
            let interval: Interval = match (c.classical, c.event, c.quantum, c.effect) {
                (Some(s), Some(event), None, None) => s.event_interval(&event).map_err(CliError::invalid)?,
                (None, None, Some(s), Some(e)) => s.effect_interval(&e).map_err(CliError::invalid)?,
                _ => {
                    return Err(CliError::Config {
                        message: "give `classical` with `event`, or `quantum` with `effect`".into(),
                        schema: INTERVAL_SCHEMA,
                    })
                }
            };
            named("freestate", "interval", Output::json(interval)?)
        }
        FreestateCmd::Witness => {
            let (mut c, _) = ctx.parse::<WitnessConfig>(WITNESS_SCHEMA, None)?;
            if let Some(seed) = ctx.seed {
                c.options.seed = seed;
            }
            let w = separating_witness(&c.s1, &c.s2, c.tol, &c.options).map_err(CliError::invalid)?;
            let out = Output::json(serde_json::json!({
                "differ": w.is_some(),
                "witness": w,
                "tol": c.tol,
                "options": c.options,
            }))?;
            named("freestate", "witness", out.with_seed(c.options.seed))
        }
        FreestateCmd::Or => {
            let (c, _) = ctx.parse::<OrConfig>(OR_SCHEMA, None)?;
            let out = match exactly_one(c.sets, c.classical_sets, OR_SCHEMA)? {
                Ok(sets) => {
                    let (first, rest) = sets.split_first().ok_or_else(|| CliError::invalid("no sets given"))?;
                    let mut acc = first.clone();
                    for s in rest {
                        acc = knightian_or(&acc, s).map_err(CliError::invalid)?;
                    }
                    Output::json(SetReport {
                        generators: acc.generators().len(),
                        freestate: acc,
                    })?
                }
                Err(sets) => {
                    let (first, rest) = sets.split_first().ok_or_else(|| CliError::invalid("no sets given"))?;
                    let mut acc = first.clone();
                    for s in rest {
                        acc = acc.knightian_or(s).map_err(CliError::invalid)?;
                    }
                    Output::json(SetReport {
                        generators: acc.generators().len(),
                        freestate: acc,
                    })?
                }
            };
            named("freestate", "or", out)
        }
        FreestateCmd::Mix => {
            let (c, _) = ctx.parse::<MixConfig>(MIX_SCHEMA, None)?;
            let out = match exactly_one(c.components, c.classical_components, MIX_SCHEMA)? {
                Ok(parts) => {
                    let parts: Vec<(f64, &Freestate)> = parts.iter().map(|p| (p.weight, &p.set)).collect();
                    let m = prob_mix(&parts).map_err(CliError::invalid)?;
                    Output::json(SetReport {
                        generators: m.generators().len(),
                        freestate: m,
                    })?
                }
                Err(parts) => {
                    let parts: Vec<(f64, &ClassicalFreestate)> = parts.iter().map(|p| (p.weight, &p.set)).collect();
                    let m = ClassicalFreestate::prob_mix(&parts).map_err(CliError::invalid)?;
                    Output::json(SetReport {
                        generators: m.generators().len(),
                        freestate: m,
                    })?
                }
            };
            named("freestate", "mix", out)
        }
        FreestateCmd::CloneCheck => {
            let (c, _) = ctx.parse::<CloneConfig>(CLONE_SCHEMA, None)?;
            let feasible = clone_feasible(&c.psi, &c.phi).map_err(CliError::invalid)?;
            let overlap = c.psi.inner(&c.phi).norm();
            named(
                "freestate",
                "clone-check",
                Output::json(serde_json::json!({ "feasible": feasible, "overlap": overlap }))?,
            )
        }
    }
}

const PREDICT_SCHEMA: &str = r#"{"bound": L, "machine"?: {"step_budget": 256, "rand_budget": 16, "output_budget": 32}, "history"?: "0101"}"#;
const REGRET_SCHEMA: &str = r#"{"bound": L, "machine"?: MACHINE, "program": "RAND JMP" or "<code bits>", "sequence": "0110", "eps"?: [0.5, 0.1]}"#;
const DIAGONAL_SCHEMA: &str = r#"{"bound": L, "n": N, "machine"?: MACHINE}"#;
const OMEGA_SCHEMA: &str = r#"{"bound": L, "machine"?: MACHINE}"#;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PredictConfig {
    bound: usize,
    #[serde(default)]
    machine: MachineConfig,
    #[serde(default)]
    history: BitString,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RegretConfig {
    bound: usize,
    #[serde(default)]
    machine: MachineConfig,
    program: String,
    sequence: BitString,
    #[serde(default = "default_eps")]
    eps: Vec<f64>,
}

fn default_eps() -> Vec<f64> {
    vec![0.5, 0.1]
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagonalConfig {
    bound: usize,
    n: usize,
    #[serde(default)]
    machine: MachineConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OmegaConfig {
    bound: usize,
    #[serde(default)]
    machine: MachineConfig,
}

/// Accepts assembly (`RAND JMP`) or raw code bits.
fn program(text: &str) -> Result<Program, CliError> {
    if text.chars().any(|c| c.is_ascii_alphabetic()) {
        Program::from_asm(text).map_err(CliError::invalid)
    } else {
        text.parse().map_err(CliError::invalid)
    }
}

pub fn solomonoff(cmd: SolomonoffCmd, ctx: &Context) -> Done {
    match cmd {
        SolomonoffCmd::Predict => {
            let (c, _) = ctx.parse::<PredictConfig>(PREDICT_SCHEMA, None)?;
            let mut m = build_mixture(c.bound, &c.machine).map_err(CliError::invalid)?;
            for &b in c.history.bits() {
                m.observe(b);
            }
            let p_one = m.predict_next().map_err(CliError::invalid)?;
            let out = Output::json(serde_json::json!({
                "p_one": p_one,
                "history_probability": m.history_probability(),
                "snapshot": m.snapshot(),
            }))?;
            named("solomonoff", "predict", out)
        }
        SolomonoffCmd::Regret => {
            let (c, _) = ctx.parse::<RegretConfig>(REGRET_SCHEMA, None)?;
            let q = program(&c.program)?;
            let m = build_mixture(c.bound, &c.machine).map_err(CliError::invalid)?;
            let r = regret_report(&q, &c.sequence, &m, &c.eps).map_err(CliError::invalid)?;
            let csv = r.to_csv();
            named("solomonoff", "regret", Output::json(r)?.with_csv(csv))
        }
        SolomonoffCmd::Diagonal => {
            let (c, _) = ctx.parse::<DiagonalConfig>(DIAGONAL_SCHEMA, None)?;
            let m = build_mixture(c.bound, &c.machine).map_err(CliError::invalid)?;
            let (seq, steps) = diagonal_sequence(&m, c.n).map_err(CliError::invalid)?;
            let mut csv = String::from("step,bit,p_realized,cumulative\n");
            for s in &steps {
                csv.push_str(&format!("{},{},{},{}\n", s.step, u8::from(s.bit), s.p_realized, s.cumulative));
            }
            let out = Output::json(serde_json::json!({ "sequence": seq, "steps": steps }))?;
            named("solomonoff", "diagonal", out.with_csv(csv))
        }
        SolomonoffCmd::Omega => {
            let (c, _) = ctx.parse::<OmegaConfig>(OMEGA_SCHEMA, None)?;
            let omega = omega_truncated(c.bound, &c.machine).map_err(CliError::invalid)?;
            let out = Output::json(serde_json::json!({ "omega": omega, "omega_f64": omega.to_f64() }))?;
            named("solomonoff", "omega", out)
        }
    }
}

const K_SCHEMA: &str = r#"{"x": "0101", "bound"?: 20, "machine"?: MACHINE}"#;
const KSET_SCHEMA: &str = r#"{"elements": ["00", "01", ...], "bound"?: 20, "machine"?: MACHINE}"#;
const SOPH_SCHEMA: &str = r#"{"x": "0101", "c": C, "bound"?: 20, "machine"?: MACHINE}
or {"widths": [1, 2, ...], "cs": [0, 1, ...], "bound"?: 20, "machine"?: MACHINE}"#;

fn default_bound() -> usize {
    20
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KConfig {
    x: BitString,
    #[serde(default = "default_bound")]
    bound: usize,
    #[serde(default)]
    machine: MachineConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KsetConfig {
    elements: Vec<BitString>,
    #[serde(default = "default_bound")]
    bound: usize,
    #[serde(default)]
    machine: MachineConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SophConfig {
    x: Option<BitString>,
    c: Option<i64>,
    widths: Option<Vec<usize>>,
    cs: Option<Vec<i64>>,
    #[serde(default = "default_bound")]
    bound: usize,
    #[serde(default)]
    machine: MachineConfig,
}

pub fn soph(cmd: SophCmd, ctx: &Context) -> Done {
    match cmd {
        SophCmd::K => {
            let (c, _) = ctx.parse::<KConfig>(K_SCHEMA, None)?;
            let table = ComplexityTable::build(c.bound, &c.machine).map_err(CliError::invalid)?;
            let k = table.kolmogorov(&c.x).map_err(CliError::invalid)?;
            named("soph", "k", Output::json(serde_json::json!({ "x": c.x, "k": k }))?)
        }
        SophCmd::Kset => {
            let (c, _) = ctx.parse::<KsetConfig>(KSET_SCHEMA, None)?;
            let set = SetListing::new(c.elements).map_err(CliError::invalid)?;
            let table = ComplexityTable::build(c.bound, &c.machine).map_err(CliError::invalid)?;
            let k = table.set_complexity(&set).map_err(CliError::invalid)?;
            let out = Output::json(serde_json::json!({
                "set": set,
                "listing": set.encode(),
                "log2_size": set.log2_size(),
                "k": k,
            }))?;
            named("soph", "kset", out)
        }
        SophCmd::Soph => {
            let (c, _) = ctx.parse::<SophConfig>(SOPH_SCHEMA, None)?;
            let table = ComplexityTable::build(c.bound, &c.machine).map_err(CliError::invalid)?;
            let out = match (c.x, c.c, c.widths, c.cs) {
                (Some(x), Some(level), None, None) => {
                    let r = table.sophistication(&x, level).map_err(CliError::invalid)?;
                    Output::json(serde_json::json!({ "soph": r, "listing_overhead": LISTING_OVERHEAD }))?
                }
                (None, None, Some(widths), Some(cs)) => {
                    let t = table.tabulate(&widths, &cs);
                    let csv = t.to_csv();
                    Output::json(serde_json::json!({ "table": t, "listing_overhead": LISTING_OVERHEAD }))?
                        .with_csv(csv)
                }
                _ => {
                    return Err(CliError::Config {
                        message: "give `x` with `c`, or `widths` with `cs`".into(),
                        schema: SOPH_SCHEMA,
                    })
                }
            };
            named("soph", "soph", out)
        }
    }
}

const RUN_SCHEMA: &str = r#"{"subject": "parrot" | SUBJECT_SPEC, "predictor": {"kind": "table_learner", "window": 1} | {"kind": "bayes_filter"} | {"kind": "constant", "p": "1/2"},
 "game": {"t": T, "u": U, "epsilon": e, "delta": d, "trials": N, "seed": S, "input_model"?: {"p_one": 0.5}, "adversary"?: "adversarial" | "oblivious"}}
SUBJECT_SPEC = {"name"?: "...", "kind": "deterministic" | "noisy" | "freebit" | "gerbil_hybrid", "states": K, "initial"?: 0,
 "edges": [{"from": s, "on_input": 0|1, "to": s2, "emit"?: 0|1, "prob"?: "1/2", "freebit_index"?: i}, ...], "freebit_budget"?: B}"#;
const CLASSIFY_SCHEMA: &str = r#"{"classify": {"horizon": H, "trials": N, "seed": S, "schedule": [{"t": T, "epsilon": e, "delta": d}, ...], "input_model"?: ..., "adversary"?: ...},
 "classes"?: [{"name": "...", "members": [SUBJECT_SPEC, ...]}], "freebit_delay"?: D, "predictors"?: [PREDICTOR, ...]}"#;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    subject: Value,
    predictor: PredictorSpec,
    game: GameConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassifyFile {
    classify: ClassifyConfig,
    classes: Option<Vec<ReferenceClass>>,
    freebit_delay: Option<usize>,
    predictors: Option<Vec<PredictorSpec>>,
}

fn subject_spec(value: Value) -> Result<SubjectSpec, CliError> {
    match value {
        Value::String(name) => {
            catalog::by_name(&name).ok_or_else(|| CliError::Invalid(format!("no catalog subject named {name:?}")))
        }
        other => serde_json::from_value(other).map_err(|e| CliError::Config {
            message: format!("subject: {e}"),
            schema: RUN_SCHEMA,
        }),
    }
}

pub fn arena(cmd: ArenaCmd, ctx: &Context) -> Done {
    match cmd {
        ArenaCmd::Run => {
            let (c, _) = ctx.parse::<RunConfig>(RUN_SCHEMA, Some("game"))?;
            let subject = Subject::new(subject_spec(c.subject)?).map_err(CliError::invalid)?;
            let verdict = arena::run_game(&subject, &c.predictor, &c.game).map_err(CliError::invalid)?;
            let mut csv = String::from("trial,distance,distance_f64,passed,inputs,freebits\n");
            for r in &verdict.records {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.trial, r.distance, r.distance_f64, r.passed, r.inputs, r.freebits
                ));
            }
            let seed = verdict.seed;
            named("arena", "run", Output::json(verdict)?.with_csv(csv).with_seed(seed))
        }
        ArenaCmd::Classify => {
            let (c, _) = ctx.parse::<ClassifyFile>(CLASSIFY_SCHEMA, Some("classify"))?;
            let cfg = c.classify;
            let classes = match c.classes {
                Some(classes) => classes,
                None => {
                    let latest = cfg.schedule.iter().map(|e| e.t).max().unwrap_or(0);
                    let earliest = cfg.schedule.iter().map(|e| e.t).min().unwrap_or(0);
                    let delay = c.freebit_delay.unwrap_or(latest);
                    if delay < latest || delay >= earliest + cfg.horizon {
                        return Err(CliError::Invalid(format!(
                            "freebit delay {delay} must lie in every forecast window ({latest}..{})",
                            earliest + cfg.horizon
                        )));
                    }
                    arena::standard_classes(delay)
                }
            };
            let predictors = c.predictors.unwrap_or_else(PredictorSpec::defaults);
            let reports = arena::classify(&classes, &predictors, &cfg).map_err(CliError::invalid)?;
            let seed = cfg.seed;
            named("arena", "classify", Output::json(serde_json::json!({ "classes": reports }))?.with_seed(seed))
        }
    }
}

const CHSH_QUANTUM_SCHEMA: &str = r#"{"alice"?: [angle_x0, angle_x1], "bob"?: [angle_y0, angle_y1]} (radians; defaults to the optimal angles)"#;
const BOSTROM_SCHEMA: &str = r#"{"prior_heads": "1/2", "heads": [{"color": "blue", "count": 999}, ...], "tails": [{"color": "white", "count": 1}], "observed_color": "white"}"#;
const NEWCOMB_SCHEMA: &str = r#"{"accuracy": "0.9", "payoffs"?: {"large": 1000000, "small": 1000}}"#;
const CAUSAL_SCHEMA: &str = r#"{"graph": {"nodes": [{"id": "F", "kind": "macro" | "micro", "time": t}, ...], "edges": [{"cause": "F", "effect": "f"}, ...]},
 "options"?: {"single_macro_effect": true}}"#;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChshQuantumConfig {
    alice: Option<[f64; 2]>,
    bob: Option<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NewcombConfig {
    accuracy: arena::Probability,
    #[serde(default)]
    payoffs: Payoffs,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CausalConfig {
    graph: CausalGraph,
    #[serde(default)]
    options: ValidateOptions,
}

pub fn gadgets(cmd: GadgetsCmd, ctx: &Context) -> Done {
    match cmd {
        GadgetsCmd::ChshClassical => {
            let (value, witness) = chsh::classical_optimum();
            let table: Vec<Value> = chsh::classical_table()
                .into_iter()
                .map(|(s, v)| serde_json::json!({ "strategy": s, "wins": s.wins(), "value": v.to_string() }))
                .collect();
            let out = Output::json(serde_json::json!({
                "value": value.to_string(),
                "value_f64": chsh::to_f64(&value),
                "witness": witness,
                "table": table,
            }))?;
            named("gadgets", "chsh-classical", out.with_csv(chsh::classical_table_csv()))
        }
        GadgetsCmd::ChshQuantum => {
            let (c, _) = ctx.parse::<ChshQuantumConfig>(CHSH_QUANTUM_SCHEMA, None)?;
            let opt = QuantumStrategy::optimal();
            let s = QuantumStrategy {
                alice: c.alice.unwrap_or(opt.alice),
                bob: c.bob.unwrap_or(opt.bob),
            };
            let v = chsh::quantum_value(&s).map_err(CliError::invalid)?;
            let out = Output::json(serde_json::json!({
                "value": v,
                "strategy": s,
                "optimum": chsh::quantum_optimum(),
                "classical_optimum": "3/4",
            }))?;
            named("gadgets", "chsh-quantum", out)
        }
        GadgetsCmd::Bostrom => {
            let (c, _) = ctx.parse::<RoomPuzzle>(BOSTROM_SCHEMA, None)?;
            let ps = rooms::posteriors(&c).map_err(CliError::invalid)?;
            let view: Vec<Value> = ps
                .iter()
                .map(|p| {
                    serde_json::json!({
                        "rule": p.rule,
                        "heads": p.heads.to_string(),
                        "tails": p.tails.to_string(),
                        "heads_f64": chsh::to_f64(&p.heads),
                    })
                })
                .collect();
            named("gadgets", "bostrom", Output::json(serde_json::json!({ "posteriors": view }))?)
        }
        GadgetsCmd::Newcomb => {
            let (c, _) = ctx.parse::<NewcombConfig>(NEWCOMB_SCHEMA, None)?;
            let one = newcomb::expected(c.payoffs, &c.accuracy, Policy::OneBox);
            let two = newcomb::expected(c.payoffs, &c.accuracy, Policy::TwoBox);
            let better = match one.cmp(&two) {
                std::cmp::Ordering::Greater => "one-box",
                std::cmp::Ordering::Less => "two-box",
                std::cmp::Ordering::Equal => "tie",
            };
            let out = Output::json(serde_json::json!({
                "one_box": one.to_string(),
                "two_box": two.to_string(),
                "one_box_f64": chsh::to_f64(&one),
                "two_box_f64": chsh::to_f64(&two),
                "crossover": newcomb::crossover(c.payoffs).map(|x| x.to_string()),
                "better": better,
            }))?;
            named("gadgets", "newcomb", out)
        }
        GadgetsCmd::Causal => {
            let (c, _) = ctx.parse::<CausalConfig>(CAUSAL_SCHEMA, None)?;
            let violations = causal::validate(&c.graph, c.options).map_err(CliError::invalid)?;
            let acyclic = causal::is_acyclic(&c.graph).map_err(CliError::invalid)?;
            let out = Output::json(serde_json::json!({
                "valid": violations.is_empty(),
                "violations": violations,
                "acyclic": acyclic,
            }))?;
            named("gadgets", "causal", out)
        }
    }
}
