use std::io::Write;

use crate::error::Result;
use crate::geometry::{GeometryLabel, SpinGeometry};
use crate::hamiltonian::{OperatorName, OperatorSet};
use crate::operator::ComplexMatrix;
use crate::thermo::format_float;

/// Entries with modulus at or below this are omitted.
pub const DUMP_CUTOFF: f64 = 1e-14;

pub fn build_operator(
    label: GeometryLabel,
    spins: usize,
    ratio: f64,
    op: OperatorName,
) -> Result<ComplexMatrix> {
    let geom = SpinGeometry::builtin(label, spins)?;
    let ops = OperatorSet::from_ratio(&geom, ratio)?;
    Ok(ops.get(op).clone())
}

/// Writes `row,col,re,im` for every entry above [`DUMP_CUTOFF`]; indices are 0-based basis states.
pub fn write_sparse<W: Write>(m: &ComplexMatrix, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["row", "col", "re", "im"])?;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            if z.norm() > DUMP_CUTOFF {
                w.write_record([
                    r.to_string(),
                    c.to_string(),
                    format_float(z.re),
                    format_float(z.im),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
