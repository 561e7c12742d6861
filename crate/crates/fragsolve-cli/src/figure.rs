//! Moment tables for the two stock figure layouts.
//!
//! Each figure is a fixed set of scenario files compiled into the binary, so
//! `figure fig1` and `figure fig2` reproduce the same tables on any machine
//! with no external inputs.  The first layout contrasts growth and decay for
//! a linear size flow at breakup exponents of both signs; the second follows
//! decay in the constant-coefficient class, again with the exponent on
//! either side of zero.  Panels are independent scenarios and run in
//! parallel, capped by the `FRAGSOLVE_THREADS` environment variable.

use std::path::{Path, PathBuf};
use std::{env, fs, thread};

use crate::config::{parse_scenario, Format};
use crate::engine::moment_rows;
use crate::error::{config, CliError};
use crate::output::render;

/// Which of the two stock figures to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FigureKind {
    /// Linear size flow: growth and decay at exponents +3 and −3.
    Fig1,
    /// Constant-coefficient class: decay at exponents 2/3 and −3/4.
    Fig2,
}

/// Panel name (also the output file stem) and its embedded scenario.
type Panel = (&'static str, &'static str);

const FIG1_PANELS: &[Panel] = &[
    (
        "fig1_growth_alpha3",
        include_str!("../configs/fig1_growth_alpha3.toml"),
    ),
    (
        "fig1_decay_alpha3",
        include_str!("../configs/fig1_decay_alpha3.toml"),
    ),
    (
        "fig1_growth_alpha_neg3",
        include_str!("../configs/fig1_growth_alpha_neg3.toml"),
    ),
    (
        "fig1_decay_alpha_neg3",
        include_str!("../configs/fig1_decay_alpha_neg3.toml"),
    ),
];

const FIG2_PANELS: &[Panel] = &[
    (
        "fig2_decay_alpha_2_3",
        include_str!("../configs/fig2_decay_alpha_2_3.toml"),
    ),
    (
        "fig2_decay_alpha_neg_3_4",
        include_str!("../configs/fig2_decay_alpha_neg_3_4.toml"),
    ),
];

/// How many panels may run at once.  `FRAGSOLVE_THREADS` wins when set;
/// otherwise the machine's parallelism, and never more than there are panels.
fn thread_cap(panels: usize) -> Result<usize, CliError> {
    let cap = match env::var("FRAGSOLVE_THREADS") {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => {
                return Err(config(
                    "FRAGSOLVE_THREADS",
                    format!("must be a positive integer, got {raw:?}"),
                ))
            }
        },
        Err(env::VarError::NotPresent) => thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1),
        Err(env::VarError::NotUnicode(_)) => {
            return Err(config("FRAGSOLVE_THREADS", "must be valid unicode"))
        }
    };
    Ok(cap.min(panels).max(1))
}

/// Computes one panel's moment table and renders it to bytes.
fn render_panel(name: &str, text: &str, format: Format) -> Result<(String, Vec<u8>), CliError> {
    let scenario = parse_scenario(text, name)?;
    let rows = moment_rows(&scenario)?;
    let bytes = render(&rows, format)?;
    Ok((format!("{name}.{}", format.extension()), bytes))
}

/// Produces every panel of `which` under `out_dir`, returning the files
/// written in panel order.
pub fn run_figure(
    which: FigureKind,
    out_dir: &Path,
    format: Format,
) -> Result<Vec<PathBuf>, CliError> {
    let panels = match which {
        FigureKind::Fig1 => FIG1_PANELS,
        FigureKind::Fig2 => FIG2_PANELS,
    };
    let cap = thread_cap(panels.len())?;

    let mut rendered: Vec<(String, Vec<u8>)> = Vec::with_capacity(panels.len());
    for wave in panels.chunks(cap) {
        let outcomes = thread::scope(|scope| {
            let handles: Vec<_> = wave
                .iter()
                .map(|&(name, text)| scope.spawn(move || render_panel(name, text, format)))
                .collect();
            handles
                .into_iter()
                .map(|h| {
                    h.join()
                        .map_err(|_| CliError::Numeric("a figure panel worker panicked".into()))
                })
                .collect::<Vec<_>>()
        });
        for outcome in outcomes {
            rendered.push(outcome??);
        }
    }

    fs::create_dir_all(out_dir).map_err(|e| {
        config(
            "--out",
            format!("cannot create {}: {e}", out_dir.display()),
        )
    })?;
    let mut written = Vec::with_capacity(rendered.len());
    for (file, bytes) in rendered {
        let path = out_dir.join(file);
        fs::write(&path, bytes)
            .map_err(|e| config("--out", format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}
