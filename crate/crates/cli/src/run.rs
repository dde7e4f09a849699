use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use tomolab::apst::{apst_reconstruct, apst_reconstruct_with, ApstConfig};
use tomolab::aupt::{aupt_reconstruct, unitary_distance};
use tomolab::metrics::{average_fidelity_closed_form, average_fidelity_mc, average_fidelity_ptm, FidelityParams};
use tomolab::nmr2q::{nmr_aupt_reconstruct, NmrConfig};
use tomolab::oracle::{derive_seed, ChannelOracle, HiddenChannel, PreparedInput, StateOracle};
use tomolab::quantum::{
    gram_schmidt_complete, haar_random_state, haar_random_unitary, ptm_from_unitary, qubit_count, seeded_rng,
};
use tomolab::stdqpt::stdqpt_reconstruct;
use tomolab::{gates, PauliTransferMatrix, PureState, UnitaryMatrix};

use crate::config::{ExperimentConfig, FidelityMethod, HiddenSpec, Protocol};

/// One line of summary.csv.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub protocol: String,
    pub gate: String,
    pub dim: usize,
    pub mode: String,
    pub shots: Option<u64>,
    pub noise: String,
    pub seed: u64,
    pub count: usize,
    pub fidelity: f64,
    pub distance: f64,
}

/// One line of comparison.csv, written by `compare`.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub gate: String,
    pub seed: u64,
    pub stdqpt_count: usize,
    pub nmr2q_count: usize,
    pub stdqpt_fidelity: f64,
    pub nmr2q_fidelity: f64,
}

#[derive(Debug, Clone)]
pub struct RepOutcome {
    pub json: Value,
    pub rows: Vec<SummaryRow>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub rows: Vec<SummaryRow>,
    pub comparison: Option<Vec<ComparisonRow>>,
}

enum Hidden {
    Unitary(UnitaryMatrix),
    State(PureState),
}

struct Measured {
    json: Value,
    count: usize,
    fidelity: f64,
    distance: f64,
}

pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let outcomes: Vec<RepOutcome> = (0..config.reps)
        .into_par_iter()
        .map(|i| {
            let seed = config.rep_seed(i);
            run_rep(config, i, seed).with_context(|| format!("repetition {i} (seed {seed})"))
        })
        .collect::<Result<_>>()?;
    let rows: Vec<SummaryRow> = outcomes.iter().flat_map(|o| o.rows.iter().cloned()).collect();
    let comparison = (config.protocol == Protocol::Compare).then(|| {
        rows.chunks(2)
            .map(|pair| ComparisonRow {
                gate: pair[0].gate.clone(),
                seed: pair[0].seed,
                stdqpt_count: pair[0].count,
                nmr2q_count: pair[1].count,
                stdqpt_fidelity: pair[0].fidelity,
                nmr2q_fidelity: pair[1].fidelity,
            })
            .collect()
    });
    let json = json!({
        "config": {
            "protocol": config.protocol,
            "hidden": config.hidden.label(),
            "dim": config.dim,
            "mode": config.mode_name(),
            "shots": config.shots(),
            "noise": config.noise,
            "seed": config.seed,
            "reps": config.reps,
            "fidelity": config.fidelity,
        },
        "repetitions": outcomes.into_iter().map(|o| o.json).collect::<Vec<_>>(),
    });
    Ok(Report { json, rows, comparison })
}

fn run_rep(config: &ExperimentConfig, index: usize, seed: u64) -> Result<RepOutcome> {
    let hidden = draw_hidden(config, seed)?;
    let oracle_seed = derive_seed(&mut seeded_rng(seed));
    let protocols: &[Protocol] = match config.protocol {
        Protocol::Compare => &[Protocol::Stdqpt, Protocol::Nmr2q],
        ref p => std::slice::from_ref(p),
    };
    let mut results = serde_json::Map::new();
    let mut rows = Vec::new();
    for &protocol in protocols {
        let m = measure(config, protocol, &hidden, seed, oracle_seed)?;
        rows.push(SummaryRow {
            protocol: protocol.to_string(),
            gate: config.hidden.label().to_string(),
            dim: config.dim,
            mode: config.mode_name().to_string(),
            shots: config.shots(),
            noise: config.noise.to_string(),
            seed,
            count: m.count,
            fidelity: m.fidelity,
            distance: m.distance,
        });
        let mut entry = m.json;
        entry["fidelity"] = json!(m.fidelity);
        entry["distance"] = json!(m.distance);
        results.insert(protocol.to_string(), entry);
    }
    let hidden_json = match &hidden {
        Hidden::Unitary(u) => json!({ "unitary": u }),
        Hidden::State(s) => json!({ "state": s }),
    };
    Ok(RepOutcome {
        json: json!({
            "index": index,
            "seed": seed,
            "hidden": hidden_json,
            "results": results,
        }),
        rows,
    })
}

fn draw_hidden(config: &ExperimentConfig, seed: u64) -> Result<Hidden> {
    let apst = config.protocol == Protocol::Apst;
    let unitary = match &config.hidden {
        HiddenSpec::State { state, .. } => return Ok(Hidden::State(state.clone())),
        HiddenSpec::Random if apst => return Ok(Hidden::State(haar_random_state(config.dim, seed)?)),
        HiddenSpec::Random => haar_random_unitary(config.dim, seed)?,
        HiddenSpec::Gate(name) => gates::by_name(name)?,
        HiddenSpec::Unitary { unitary, .. } => unitary.clone(),
    };
    // apst on a channel reconstructs the image of |0>
    if apst {
        return Ok(Hidden::State(PureState::new(unitary.column(0))?));
    }
    Ok(Hidden::Unitary(unitary))
}

fn measure(
    config: &ExperimentConfig,
    protocol: Protocol,
    hidden: &Hidden,
    seed: u64,
    oracle_seed: u64,
) -> Result<Measured> {
    let u = match (protocol, hidden) {
        (Protocol::Apst, Hidden::State(psi)) => return measure_apst(config, psi, oracle_seed),
        (_, Hidden::Unitary(u)) => u,
        _ => unreachable!("hidden object matches the protocol"),
    };
    let oracle = ChannelOracle::new(u.clone(), config.noise, config.mode, oracle_seed)?;
    let fid = |channel: HiddenChannel| fidelity(config.fidelity, channel, u, seed);
    match protocol {
        Protocol::Aupt => {
            let r = aupt_reconstruct(oracle, &ApstConfig::default())?;
            Ok(Measured {
                json: r.to_json()?,
                count: r.measurement_count,
                distance: unitary_distance(&r.unitary, u)?,
                fidelity: fid(HiddenChannel::Unitary(r.unitary))?,
            })
        }
        Protocol::Nmr2q => {
            let mut nmr = NmrConfig::default();
            if matches!(config.hidden, HiddenSpec::Gate(_)) {
                nmr = nmr.with_target(u.clone());
            }
            let r = nmr_aupt_reconstruct(oracle, &nmr)?;
            Ok(Measured {
                json: r.to_json()?,
                count: r.measurement_count,
                distance: unitary_distance(&r.unitary, u)?,
                fidelity: fid(HiddenChannel::Unitary(r.unitary))?,
            })
        }
        Protocol::Stdqpt => {
            let n = qubit_count(config.dim)?;
            let r = stdqpt_reconstruct(oracle, n)?;
            let ideal = ptm_from_unitary(u, n)?;
            Ok(Measured {
                json: json!({
                    "count": r.measurement_count,
                    "pauli_settings": r.ledger.pauli_settings(),
                    "ptm": ptm_json(&r.ptm),
                }),
                count: r.measurement_count,
                distance: (r.ptm.entries() - ideal.entries()).norm(),
                fidelity: fid(HiddenChannel::Ptm(r.ptm))?,
            })
        }
        Protocol::Apst | Protocol::Compare => unreachable!("dispatched above"),
    }
}

fn measure_apst(config: &ExperimentConfig, psi: &PureState, oracle_seed: u64) -> Result<Measured> {
    let apst = ApstConfig::default();
    let (json, state, count) = if config.noise.is_noiseless() {
        let oracle = StateOracle::from_pure(psi, config.mode, oracle_seed)?;
        let r = apst_reconstruct(oracle, &apst)?;
        (r.to_json(Some(psi))?, r.state, r.measurement_count)
    } else {
        // noisy preparation: hide a unitary whose first column is psi
        let columns = gram_schmidt_complete(&[psi.amplitudes().clone()], psi.dim())?;
        let prep = UnitaryMatrix::from_columns(&columns)?;
        let mut oracle = ChannelOracle::new(prep, config.noise, config.mode, oracle_seed)?;
        let mut input = PreparedInput::new(&mut oracle, PureState::basis(psi.dim(), 0)?)?;
        let r = apst_reconstruct_with(&mut input, &apst)?;
        let json = json!({
            "k": r.k,
            "count": r.measurement_count,
            "state": &r.state,
            "fidelity_vs_hidden": r.state.fidelity(psi)?,
        });
        (json, r.state, r.measurement_count)
    };
    let f = state.fidelity(psi)?;
    Ok(Measured {
        json,
        count,
        fidelity: f,
        distance: (1.0 - f).max(0.0).sqrt(),
    })
}

fn fidelity(method: FidelityMethod, channel: HiddenChannel, target: &UnitaryMatrix, seed: u64) -> Result<f64> {
    Ok(match (method, channel) {
        (FidelityMethod::Exact, HiddenChannel::Unitary(v)) => average_fidelity_closed_form(&v, target)?,
        (FidelityMethod::Exact, HiddenChannel::Ptm(r)) => average_fidelity_ptm(&r, target)?,
        (FidelityMethod::Mc, channel) => {
            let params = FidelityParams {
                seed,
                ..FidelityParams::default()
            };
            average_fidelity_mc(&channel, target, &params)?.mean
        }
    })
}

/// Pauli labels and coefficients; `by_input[i][j]` is the weight of output
/// Pauli `j` for input Pauli `i`.
fn ptm_json(r: &PauliTransferMatrix) -> Value {
    let e = r.entries();
    let by_input: Vec<Vec<f64>> = (0..e.ncols()).map(|i| e.column(i).iter().copied().collect()).collect();
    json!({ "labels": r.labels(), "by_input": by_input })
}
