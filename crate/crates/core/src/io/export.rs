//! CSV tables and OBJ meshes.
//!
//! Floats are written in Rust's shortest round-trip form, so parsing a table
//! back yields the same `f64` values.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::dual_vector::Vec3;
use crate::error::Result;
use crate::surface::{DarbouxState, RuledSurface};

pub const INVARIANT_COLUMNS: [&str; 18] = [
    "s",
    "e_x",
    "e_y",
    "e_z",
    "t_x",
    "t_y",
    "t_z",
    "g_x",
    "g_y",
    "g_z",
    "gamma",
    "delta",
    "Delta",
    "gamma_dual",
    "R_real",
    "R_dual",
    "rho_real",
    "rho_dual",
];

/// Frames at `samples` equally spaced arc lengths covering the whole surface.
pub fn invariant_table(surface: &RuledSurface, samples: usize) -> Result<Vec<DarbouxState>> {
    surface
        .sample_parameters(samples)
        .into_par_iter()
        .map(|s| surface.frame_at(s))
        .collect()
}

pub fn invariant_record(st: &DarbouxState) -> [f64; 18] {
    [
        st.s,
        st.e.x,
        st.e.y,
        st.e.z,
        st.t.x,
        st.t.y,
        st.t.z,
        st.g.x,
        st.g.y,
        st.g.z,
        st.gamma,
        st.delta,
        st.dist_param,
        st.gamma_dual.dual,
        st.r_bar.real,
        st.r_bar.dual,
        st.rho_bar.real,
        st.rho_bar.dual,
    ]
}

/// Writes an invariant table; with `offset_index` a leading `offset` column is added.
pub fn write_invariants_csv<W: Write>(
    writer: &mut csv::Writer<W>,
    states: &[DarbouxState],
    offset_index: Option<usize>,
    header: bool,
) -> csv::Result<()> {
    if header {
        let mut cols: Vec<&str> = Vec::with_capacity(19);
        if offset_index.is_some() {
            cols.push("offset");
        }
        cols.extend(INVARIANT_COLUMNS);
        writer.write_record(&cols)?;
    }
    for st in states {
        let mut rec: Vec<String> = Vec::with_capacity(19);
        if let Some(k) = offset_index {
            rec.push(k.to_string());
        }
        rec.extend(invariant_record(st).iter().map(f64::to_string));
        writer.write_record(&rec)?;
    }
    Ok(())
}

/// Writes a point grid as an OBJ mesh of quads (`v` and `f` records only).
pub fn write_obj<W: Write>(mut w: W, grid: &[Vec<Vec3>]) -> io::Result<()> {
    for row in grid {
        for p in row {
            writeln!(w, "v {} {} {}", p.x, p.y, p.z)?;
        }
    }
    let cols = grid.first().map_or(0, Vec::len);
    for i in 1..grid.len() {
        for j in 1..cols {
            let a = (i - 1) * cols + j;
            let b = i * cols + j;
            writeln!(w, "f {} {} {} {}", a, b, b + 1, a + 1)?;
        }
    }
    w.flush()
}
