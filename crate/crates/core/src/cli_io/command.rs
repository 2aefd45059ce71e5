use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use super::format::{emit_report, Format};
use super::input::{parse_input, InputDocument, InputError};
use super::report::{
    critical_values, ComponentSpectrum, ExtensionEntry, KmsSection, OrderingEntry, PhaseSection,
    ReportDocument, ReportError, SpectraSection,
};
use crate::components::{check_assumptions, decompose};
use crate::dumbbell_lab::{
    fuzz_ordering, make_dumbbell, AppendixParams, BridgeMode, Dumbbell2Params, DumbbellError,
    DumbbellParams, Figure3Params, FuzzConfig,
};
use crate::graph_core::{validate_skeleton, GraphError, Skeleton};
use crate::kms_engine::{
    kms1_extremes, normalize_dynamics, phase_diagram, verify_state, Dynamics, DynamicsSpec,
    KmsError, KmsOptions, PhaseDiagram,
};
use crate::spectral::{
    check_spectral_ordering, common_pf_eigenvector, dominant_colors, extend_eigenvector,
    spectral_radius,
};
use crate::Tolerances;

#[derive(Debug, Parser)]
#[command(
    name = "kgraph-kms",
    version,
    about = "KMS states of finite higher-rank graphs"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Tolerance for verifying emitted states.
    #[arg(long, default_value_t = 1e-9, global = true)]
    pub tol: f64,
    /// Run the KMS procedure even when the standing assumptions fail.
    #[arg(long, global = true)]
    pub allow_violations: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check shapes, signs, commutation, sources and sinks.
    Validate { input: PathBuf },
    /// Strongly connected components and the standing assumptions.
    Components { input: PathBuf },
    /// Spectral radii, Perron vectors, eigenvector extensions and ordering checks.
    Spectra { input: PathBuf },
    /// Extreme KMS_β states at one inverse temperature.
    Kms {
        input: PathBuf,
        #[arg(long)]
        beta: f64,
    },
    /// Critical values and the extreme states in every regime.
    Phase {
        input: PathBuf,
        /// Also list the states at these inverse temperatures.
        #[arg(long = "eval", value_delimiter = ',')]
        eval: Vec<f64>,
    },
    /// Build a dumbbell skeleton from loop and bridge counts.
    Dumbbell {
        #[arg(long, value_enum)]
        figure: Figure,
        /// Comma-separated counts, colour 1 then colour 2 for each bundle:
        /// figure 2 `m,n,p`; figure 3 `l,m,n,p,q`; appendix `m,n,p,q,r,s`.
        #[arg(long, value_delimiter = ',')]
        params: Vec<u64>,
    },
    /// Random commuting three-vertex dumbbells against the spectral ordering property.
    Fuzz {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        count: usize,
        /// Largest loop or bridge count drawn.
        #[arg(long, default_value_t = 6)]
        bounds: u64,
        #[arg(long, value_enum, default_value_t = FuzzMode::All)]
        mode: FuzzMode,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    #[value(name = "a")]
    Appendix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FuzzMode {
    All,
    ZeroS,
    ZeroR,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Kms(#[from] KmsError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Dumbbell(#[from] DumbbellError),
    #[error("figure {figure} expects {expected} counts, got {got}")]
    ParamCount {
        figure: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("β must be positive, got {0}")]
    Beta(f64),
}

/// Result of a run: the report, and whether the input met every requirement.
#[derive(Debug)]
pub struct Outcome {
    pub report: ReportDocument,
    pub clean: bool,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATIONS: i32 = 3;

fn read_input(path: &PathBuf) -> Result<InputDocument, CliError> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|source| CliError::Io {
                path: "<stdin>".into(),
                source,
            })?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?
    };
    Ok(parse_input(&text)?)
}

struct Loaded {
    report: ReportDocument,
    skel: Option<Skeleton>,
    doc: InputDocument,
}

fn load(path: &PathBuf, command: &str, tol: Tolerances) -> Result<Loaded, CliError> {
    let doc = read_input(path)?;
    let mut report = ReportDocument::new(command, tol);
    report.vertices = doc.vertices.clone();
    report.rationally_independent = Some(doc.attestation());
    report.warnings.extend(doc.warnings());
    let validation = validate_skeleton(&doc.raw_skeleton());
    let skel = if validation.passed {
        Some(doc.skeleton()?)
    } else {
        None
    };
    report.validation = Some(validation);
    Ok(Loaded { report, skel, doc })
}

/// Adds components and assumptions; returns whether the assumptions pass.
fn add_structure(report: &mut ReportDocument, skel: &Skeleton) -> bool {
    let decomp = decompose(skel);
    let assumptions = check_assumptions(skel, &decomp);
    let pass = assumptions.all_pass;
    report.components = Some(decomp);
    report.assumptions = Some(assumptions);
    pass
}

fn spectra_section(skel: &Skeleton, tol: &Tolerances) -> SpectraSection {
    let decomp = decompose(skel);
    let color_radii = skel
        .matrices()
        .iter()
        .map(|m| spectral_radius(&m.to_f64()))
        .collect();
    let components = (0..decomp.len())
        .map(|c| {
            let verts = &decomp.components[c];
            let perron_vector = if decomp.coordinatewise_irreducible[c] && !decomp.trivial[c] {
                let family: Vec<_> = skel
                    .matrices()
                    .iter()
                    .map(|m| m.block_f64(verts, verts))
                    .collect();
                common_pf_eigenvector(&family, tol.eigen_residual)
                    .ok()
                    .map(|pf| pf.vector)
            } else {
                None
            };
            ComponentSpectrum {
                vertices: verts.clone(),
                radii: decomp.radii[c].clone(),
                perron_vector,
            }
        })
        .collect();
    let mut extensions = Vec::new();
    let mut orderings = Vec::new();
    for d in decomp
        .nontrivial()
        .filter(|&d| decomp.is_hereditary(d) && decomp.coordinatewise_irreducible[d])
    {
        let verts = decomp.components[d].clone();
        let colors = dominant_colors(&decomp, d, tol);
        let (result, error) = if colors.is_empty() {
            (
                None,
                Some("no colour in which the component dominates its feeders".to_string()),
            )
        } else {
            match extend_eigenvector(skel, &verts, &colors, tol) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            }
        };
        extensions.push(ExtensionEntry {
            component: verts.clone(),
            colors,
            result,
            error,
        });
        for color in 0..skel.k() {
            orderings.push(OrderingEntry {
                component: verts.clone(),
                color,
                verdict: check_spectral_ordering(skel, &decomp, d, color, tol),
            });
        }
    }
    SpectraSection {
        color_radii,
        components,
        extensions,
        orderings,
    }
}

fn kms_section(
    skel: &Skeleton,
    dynamics: &Dynamics,
    diagram: &PhaseDiagram,
    beta: f64,
    tol: &Tolerances,
) -> Result<KmsSection, CliError> {
    if !(beta > 0.0) {
        return Err(CliError::Beta(beta));
    }
    let states = diagram.extremes_at(skel, beta, tol)?;
    let checks = states
        .iter()
        .map(|st| verify_state(skel, dynamics, beta, &st.m, tol.state))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(KmsSection {
        beta,
        extreme_count: states.len(),
        states,
        checks,
        kms1: None,
    })
}

fn phase_section(diagram: &PhaseDiagram, dynamics: &Dynamics) -> PhaseSection {
    PhaseSection {
        critical_betas: critical_values(diagram, dynamics),
        terminal_beta: diagram.terminal_beta,
        regimes: diagram.regimes.clone(),
        evaluations: Vec::new(),
        tree: diagram.root.clone(),
    }
}

fn dynamics_for(
    doc: &InputDocument,
    skel: &Skeleton,
    tol: &Tolerances,
) -> Result<Dynamics, CliError> {
    Ok(normalize_dynamics(
        skel,
        &doc.dynamics,
        doc.attestation(),
        tol,
    )?)
}

fn dumbbell_params(figure: Figure, v: &[u64]) -> Result<DumbbellParams, CliError> {
    let (name, expected) = match figure {
        Figure::Two => ("2", 6),
        Figure::Three => ("3", 10),
        Figure::Appendix => ("a", 12),
    };
    if v.len() != expected {
        return Err(CliError::ParamCount {
            figure: name,
            expected,
            got: v.len(),
        });
    }
    let pair = |a: usize| [v[a], v[a + 1]];
    Ok(match figure {
        Figure::Two => DumbbellParams::Two(Dumbbell2Params {
            m: pair(0),
            n: pair(2),
            p: pair(4),
        }),
        Figure::Three => DumbbellParams::Figure3(Figure3Params {
            l: pair(0),
            m: pair(2),
            n: pair(4),
            p: pair(6),
            q: pair(8),
        }),
        Figure::Appendix => DumbbellParams::Appendix(AppendixParams {
            m: pair(0),
            n: pair(2),
            p: pair(4),
            q: pair(6),
            r: pair(8),
            s: pair(10),
        }),
    })
}

/// Full pipeline for a valid skeleton: structure, dynamics and the sweep.
fn analyse(
    report: &mut ReportDocument,
    skel: &Skeleton,
    spec: &DynamicsSpec,
    attestation: bool,
    opts: &KmsOptions,
) -> Result<(bool, Option<(Dynamics, PhaseDiagram)>), CliError> {
    let pass = add_structure(report, skel);
    if !pass && !opts.allow_violations {
        return Ok((false, None));
    }
    let dynamics = normalize_dynamics(skel, spec, attestation, &opts.tol)?;
    let diagram = phase_diagram(skel, &dynamics, opts)?;
    report.warnings.extend(diagram.warnings.iter().cloned());
    report.phase = Some(phase_section(&diagram, &dynamics));
    report.dynamics = Some(dynamics.clone());
    Ok((pass, Some((dynamics, diagram))))
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let tol = Tolerances::default().with_state(cli.global.tol);
    let opts = KmsOptions {
        tol,
        allow_violations: cli.global.allow_violations,
    };
    match &cli.command {
        Command::Validate { input } => {
            let loaded = load(input, "validate", tol)?;
            let clean = loaded.skel.is_some();
            Ok(Outcome {
                report: loaded.report,
                clean,
            })
        }
        Command::Components { input } => {
            let Loaded {
                mut report, skel, ..
            } = load(input, "components", tol)?;
            let Some(skel) = skel else {
                return Ok(Outcome {
                    report,
                    clean: false,
                });
            };
            let pass = add_structure(&mut report, &skel);
            Ok(Outcome {
                report,
                clean: pass || opts.allow_violations,
            })
        }
        Command::Spectra { input } => {
            let Loaded {
                mut report, skel, ..
            } = load(input, "spectra", tol)?;
            let Some(skel) = skel else {
                return Ok(Outcome {
                    report,
                    clean: false,
                });
            };
            let pass = add_structure(&mut report, &skel);
            report.spectra = Some(spectra_section(&skel, &tol));
            Ok(Outcome {
                report,
                clean: pass || opts.allow_violations,
            })
        }
        Command::Kms { input, beta } => {
            let Loaded {
                mut report,
                skel,
                doc,
            } = load(input, "kms", tol)?;
            let Some(skel) = skel else {
                return Ok(Outcome {
                    report,
                    clean: false,
                });
            };
            let pass = add_structure(&mut report, &skel);
            if !pass && !opts.allow_violations {
                return Ok(Outcome {
                    report,
                    clean: false,
                });
            }
            let dynamics = dynamics_for(&doc, &skel, &tol)?;
            let diagram = phase_diagram(&skel, &dynamics, &opts)?;
            let mut section = kms_section(&skel, &dynamics, &diagram, *beta, &tol)?;
            if (*beta - 1.0).abs() <= 1e-9 {
                section.kms1 = Some(kms1_extremes(&skel, &dynamics, &opts)?);
            }
            report.warnings.extend(diagram.warnings.iter().cloned());
            report.kms = Some(section);
            report.dynamics = Some(dynamics.clone());
            report.verify_states(&skel, &dynamics)?;
            Ok(Outcome {
                report,
                clean: pass || opts.allow_violations,
            })
        }
        Command::Phase { input, eval } => {
            let Loaded {
                mut report,
                skel,
                doc,
            } = load(input, "phase", tol)?;
            let Some(skel) = skel else {
                return Ok(Outcome {
                    report,
                    clean: false,
                });
            };
            let (pass, analysed) =
                analyse(&mut report, &skel, &doc.dynamics, doc.attestation(), &opts)?;
            if let Some((dynamics, diagram)) = analysed {
                let evaluations = eval
                    .iter()
                    .map(|&b| kms_section(&skel, &dynamics, &diagram, b, &tol))
                    .collect::<Result<Vec<_>, _>>()?;
                if let Some(p) = report.phase.as_mut() {
                    p.evaluations = evaluations;
                }
                report.verify_states(&skel, &dynamics)?;
            }
            Ok(Outcome {
                report,
                clean: pass || opts.allow_violations,
            })
        }
        Command::Dumbbell { figure, params } => {
            let params = dumbbell_params(*figure, params)?;
            let dumbbell = make_dumbbell(&params)?;
            let mut report = ReportDocument::new("dumbbell", tol);
            report.vertices = dumbbell.raw().vertex_labels;
            report.validation = Some(dumbbell.validation.clone());
            report.dumbbell = Some(dumbbell.clone());
            let Ok(skel) = dumbbell.skeleton() else {
                return Ok(Outcome {
                    report,
                    clean: false,
                });
            };
            report.rationally_independent = Some(true);
            report
                .warnings
                .push("rates are assumed rationally independent for the preferred dynamics".into());
            let (pass, analysed) =
                analyse(&mut report, &skel, &DynamicsSpec::Preferred, true, &opts)?;
            if let Some((dynamics, _)) = analysed {
                report.verify_states(&skel, &dynamics)?;
            }
            Ok(Outcome {
                report,
                clean: pass || opts.allow_violations,
            })
        }
        Command::Fuzz {
            seed,
            count,
            bounds,
            mode,
        } => {
            let config = FuzzConfig {
                seed: *seed,
                count: *count,
                bound: (*bounds).max(2),
                mode: match mode {
                    FuzzMode::All => BridgeMode::AllNonzero,
                    FuzzMode::ZeroS => BridgeMode::ZeroS,
                    FuzzMode::ZeroR => BridgeMode::ZeroR,
                },
            };
            let fuzz = fuzz_ordering(&config, &tol);
            let clean = fuzz.counterexamples.is_empty();
            let mut report = ReportDocument::new("fuzz", tol);
            report.fuzz = Some(fuzz);
            Ok(Outcome { report, clean })
        }
    }
}

/// Runs the CLI, prints the report and returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", emit_report(&outcome.report, cli.global.format));
            if outcome.clean {
                EXIT_OK
            } else {
                EXIT_VIOLATIONS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
