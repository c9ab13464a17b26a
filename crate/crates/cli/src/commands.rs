use flyq::entanglement::{concurrence, log_space, makhlin_invariants, optimality_sweep, MakhlinInvariants, SweepResult};
use flyq::oracle::grid::BarrierShape;
use flyq::oracle::spread::spread_averaged_gate;
use flyq::oracle::study::{
    check_unitarity, odd_channel_study_for, phase_table_for, OracleSetup, Preset, CSV_HEADER,
};
use flyq::physparams::{load_config, report};
use flyq::smatrix::{spinless_gate, spinless_gate_idealized};
use flyq::{apply, Basis, CollisionConfig, Coupling, GateFamily, SpinlessEncoding, TwoQubitGate, TwoQubitState};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::output::{emit_csv, emit_json, parse_list};
use crate::{Channel, Cli, Command, FidelityArgs, GateArgs, GateKind, OracleArgs, ParamsArgs, PresetArg, ShapeArg, SpinFamily, SweepArgs};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Gate(a) => gate(cli, a),
        Command::Sweep(a) => sweep(cli, a),
        Command::Oracle(a) => oracle(cli, a),
        Command::Fidelity(a) => fidelity(cli, a),
        Command::Params(a) => params(cli, a),
    }
}

fn family(f: SpinFamily) -> GateFamily {
    match f {
        SpinFamily::Boson => GateFamily::Boson,
        SpinFamily::Fermion => GateFamily::Fermion,
    }
}

fn preset(p: PresetArg) -> Preset {
    match p {
        PresetArg::Fast => Preset::Fast,
        PresetArg::Accurate => Preset::Accurate,
    }
}

fn require<T>(value: Option<T>, flag: &str, kind: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("`gate {kind}` needs --{flag}")))
}

fn forbid(present: bool, flag: &str, kind: &str) -> Result<(), CliError> {
    if present {
        return Err(CliError::Usage(format!("--{flag} does not apply to `gate {kind}`")));
    }
    Ok(())
}

#[derive(Serialize)]
struct BasisOutput {
    input: &'static str,
    amplitudes: [Complex64; 4],
    concurrence: f64,
}

#[derive(Serialize)]
struct GateDump {
    family: &'static str,
    matrix: TwoQubitGate,
    makhlin: MakhlinInvariants,
    unitarity_residual: f64,
    outputs: Vec<BasisOutput>,
}

fn gate(cli: &Cli, a: &GateArgs) -> Result<(), CliError> {
    let mut manifest = RunManifest::new("gate", cli.seed);
    let (name, g) = match a.family {
        GateKind::Boson | GateKind::Fermion => {
            let kind = if matches!(a.family, GateKind::Boson) { "boson" } else { "fermion" };
            forbid(a.lambda0.is_some() || a.lambda1.is_some(), "lambda0/--lambda1", kind)?;
            let pa = require(a.pa, "pa", kind)?;
            let pb = require(a.pb, "pb", kind)?;
            let c_text = require(a.c.clone(), "c", kind)?;
            let c: Coupling = c_text.parse()?;
            let cfg = CollisionConfig::new(pa, pb, c)?;
            manifest = manifest.param("pa", pa).param("pb", pb).param("c", c);
            let fam: GateFamily = kind.parse()?;
            (fam.name(), fam.gate(&cfg))
        }
        GateKind::Spinless => {
            forbid(a.pa.is_some() || a.pb.is_some(), "pa/--pb", "spinless")?;
            let l0 = require(a.lambda0, "lambda0", "spinless")?;
            let l1 = require(a.lambda1, "lambda1", "spinless")?;
            let c: Coupling = require(a.c.clone(), "c", "spinless")?.parse()?;
            manifest = manifest.param("lambda0", l0).param("lambda1", l1).param("c", c);
            ("spinless", spinless_gate(&SpinlessEncoding::new(l0, l1)?, c)?)
        }
        GateKind::SpinlessIdeal => {
            let any = a.pa.is_some() || a.pb.is_some() || a.c.is_some() || a.lambda0.is_some() || a.lambda1.is_some();
            forbid(any, "pa/--pb/--c/--lambda0/--lambda1", "spinless-ideal")?;
            ("spinless-ideal", spinless_gate_idealized())
        }
    };
    manifest = manifest.param("family", name);
    let outputs = Basis::ALL
        .iter()
        .map(|&b| {
            let out = apply(&g, &TwoQubitState::basis(b));
            Ok(BasisOutput { input: b.label(), amplitudes: out.amplitudes(), concurrence: concurrence(&out)? })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let dump = GateDump {
        family: name,
        makhlin: makhlin_invariants(&g),
        unitarity_residual: g.unitarity_residual(),
        matrix: g,
        outputs,
    };
    emit_json(cli.output.as_deref(), &manifest, &dump)
}

fn sweep(cli: &Cli, a: &SweepArgs) -> Result<(), CliError> {
    if a.points == 0 {
        return Err(CliError::Usage("--points must be at least 1".into()));
    }
    if !(a.min > 0.0 && a.max.is_finite() && a.min <= a.max) {
        return Err(CliError::Usage(format!("empty ratio range [{}, {}]", a.min, a.max)));
    }
    if a.points > 1 && a.min == a.max {
        return Err(CliError::Usage("--min equals --max; use --points 1".into()));
    }
    let fam = family(a.family);
    let ratios = log_space(a.min, a.max, a.points);
    let rows = optimality_sweep(&ratios, a.samples, cli.seed, fam)?;
    let manifest = RunManifest::new("sweep", cli.seed)
        .param("family", fam.name())
        .param("min", a.min)
        .param("max", a.max)
        .param("points", a.points)
        .param("samples", a.samples);
    let lines: Vec<String> = rows
        .iter()
        .map(|r| format!("{:.16e},{:.16e},{:.16e},{:.16e}", r.ratio, r.entangling_power, r.stderr, r.max_concurrence))
        .collect();
    emit_csv(cli.output.as_deref(), &manifest, SweepResult::CSV_HEADER, &lines)
}

fn oracle(cli: &Cli, a: &OracleArgs) -> Result<(), CliError> {
    let ratios = parse_list("ratios", &a.ratios)?;
    let preset = preset(cli.preset);
    let shape = match a.shape {
        ShapeArg::Square => BarrierShape::Square,
        ShapeArg::Gaussian => BarrierShape::Gaussian,
    };
    let setups: Vec<OracleSetup> = ratios
        .iter()
        .map(|&q| {
            let s = match a.widths {
                Some(n) => OracleSetup::with_widths(q, preset, n)?,
                None => OracleSetup::new(q, preset)?,
            };
            s.with_domain_scale(a.domain_scale)
        })
        .collect::<flyq::Result<_>>()?;
    let mut manifest = RunManifest::new("oracle", cli.seed)
        .param("ratios", &a.ratios)
        .param("preset", preset.name())
        .param("shape", format!("{shape:?}").to_lowercase())
        .param("domain_scale", a.domain_scale);
    if let Some(n) = a.widths {
        manifest = manifest.param("widths", n);
    }
    match a.channel {
        Channel::Even => {
            let rows = phase_table_for(&setups, shape)?;
            check_unitarity(&rows)?;
            let lines: Vec<String> = rows.iter().map(|r| r.csv_row()).collect();
            emit_csv(cli.output.as_deref(), &manifest.param("channel", "even"), CSV_HEADER, &lines)
        }
        Channel::Odd => {
            if !matches!(shape, BarrierShape::Square) {
                return Err(CliError::Usage("the odd channel is run with the square barrier only".into()));
            }
            let studies = setups.iter().map(odd_channel_study_for).collect::<flyq::Result<Vec<_>>>()?;
            let lines: Vec<String> = studies.iter().map(|s| s.csv_row()).collect();
            let header = flyq::oracle::study::OddChannelStudy::CSV_HEADER;
            emit_csv(cli.output.as_deref(), &manifest.param("channel", "odd"), header, &lines)
        }
    }
}

fn fidelity(cli: &Cli, a: &FidelityArgs) -> Result<(), CliError> {
    let spreads = parse_list("delta-p", &a.delta_p)?;
    let fam = family(a.family);
    // Amplitudes depend on p/c only, so c = 1 loses nothing.
    let cfg = CollisionConfig::from_ratio(a.ratio, 1.0)?;
    let mut lines = Vec::with_capacity(spreads.len());
    for &d in &spreads {
        let f = spread_averaged_gate(&cfg, d, fam, a.order)?;
        lines.push(format!("{:.16e},{:.16e},{:.16e}", d, f.fidelity, f.infidelity));
    }
    let manifest = RunManifest::new("fidelity", cli.seed)
        .param("family", fam.name())
        .param("ratio", a.ratio)
        .param("delta_p", &a.delta_p)
        .param("order", a.order);
    emit_csv(cli.output.as_deref(), &manifest, "delta_p_over_c,fidelity,infidelity", &lines)
}

fn params(cli: &Cli, a: &ParamsArgs) -> Result<(), CliError> {
    let setup = load_config(&a.config)?;
    let r = report(&setup)?;
    let manifest = RunManifest::new("params", cli.seed).param("config", a.config.display());
    emit_json(cli.output.as_deref(), &manifest, &r)
}
