//! The adder benchmark family: one QDIMACS file per (width, encoding) pair
//! and a tab-separated manifest.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::cnf::{assemble, CnfError, QbfProblem};
use crate::model::{config_bit_count, CarryChainAdder, Encoding, ModelError};
use crate::qdimacs::write_qdimacs;

pub const DEFAULT_WIDTHS: [usize; 4] = [4, 5, 6, 7];
pub const MANIFEST_NAME: &str = "manifest.tsv";

#[derive(Debug, Error)]
pub enum TestSetError {
    #[error("no widths requested")]
    NoWidths,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Cnf(#[from] CnfError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestSetEntry {
    pub file: String,
    pub width: usize,
    pub encoding: Encoding,
    pub config_vars: usize,
    pub input_vars: usize,
    pub node_vars: usize,
    pub clauses: usize,
    /// Per-LUT selection bits of the naive, shrinking and choose encodings
    /// for this pool size.
    pub lut_select_bits: [u32; 3],
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<TestSetEntry>,
}

impl Manifest {
    pub const HEADER: &'static str =
        "# file\twidth\tencoding\tconfig\tinputs\tnodes\tclauses\tsel_naive\tsel_shrinking\tsel_choose";

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str(Self::HEADER);
        out.push('\n');
        for e in &self.entries {
            let [naive, shrinking, choose] = e.lut_select_bits;
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                e.file, e.width, e.encoding, e.config_vars, e.input_vars, e.node_vars, e.clauses, naive, shrinking, choose
            )
            .unwrap();
        }
        out
    }
}

pub fn file_name(width: usize, encoding: Encoding) -> String {
    format!("adder{width}_{encoding}.qdimacs")
}

/// Builds the problem for one member of the family.
pub fn adder_problem(width: usize, encoding: Encoding, lut_arity: usize) -> Result<QbfProblem, TestSetError> {
    let adder = CarryChainAdder { width, encoding, lut_arity, carry_out: true };
    let model = adder.build()?;
    Ok(assemble(&model, &adder.target())?)
}

/// Writes one file per (width, encoding) pair plus [`MANIFEST_NAME`] into
/// `out_dir`. Files are generated in parallel; their content does not
/// depend on scheduling.
pub fn generate_test_set(
    widths: &[usize],
    encodings: &[Encoding],
    lut_arity: usize,
    out_dir: &Path,
) -> Result<Manifest, TestSetError> {
    if widths.is_empty() || encodings.is_empty() {
        return Err(TestSetError::NoWidths);
    }
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| TestSetError::Io { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let jobs: Vec<(usize, Encoding)> =
        widths.iter().flat_map(|&w| encodings.iter().map(move |&e| (w, e))).collect();
    let entries = jobs
        .par_iter()
        .map(|&(width, encoding)| {
            let problem = adder_problem(width, encoding, lut_arity)?;
            let file = file_name(width, encoding);
            let path = out_dir.join(&file);
            let sink = File::create(&path).map_err(io_err(&path))?;
            write_qdimacs(&problem, sink).map_err(io_err(&path))?;
            let n = 2 * width + 2;
            let sel = |e| config_bit_count(e, n, lut_arity).unwrap_or(0);
            Ok(TestSetEntry {
                file,
                width,
                encoding,
                config_vars: problem.prefix.config.len(),
                input_vars: problem.prefix.inputs.len(),
                node_vars: problem.prefix.nodes.len(),
                clauses: problem.matrix.len(),
                lut_select_bits: [sel(Encoding::NaiveCmux), sel(Encoding::ShrinkingCmux), sel(Encoding::Choose)],
            })
        })
        .collect::<Result<Vec<_>, TestSetError>>()?;
    let manifest = Manifest { entries };
    let path = out_dir.join(MANIFEST_NAME);
    fs::write(&path, manifest.to_tsv()).map_err(io_err(&path))?;
    Ok(manifest)
}
