//! Rotated surface-code patch: qubit layout, stabilizer faces, logical
//! operators, and the four-Majorana network that encodes each qubit.

pub mod monomial;
pub mod network;

use serde::Serialize;

/// One stabilizer face. Faces live on the dual grid with corners
/// (i, j) ∈ {0..d}²; face (i, j) covers the data qubits in rows i−1..i and
/// columns j−1..j that exist, so interior faces have four qubits and
/// boundary faces two.
#[derive(Clone, Debug, Serialize)]
pub struct Face {
    pub i: usize,
    pub j: usize,
    /// Data qubits of the face, sorted ascending (q = row·d + col).
    pub qubits: Vec<usize>,
}

/// A distance-d rotated surface-code patch (d odd). Data qubits are indexed
/// row-major from the top-left corner: qubit (r, c) ↦ r·d + c.
#[derive(Clone, Debug, Serialize)]
pub struct CodePatch {
    pub d: usize,
    /// X-type faces (detect Z errors), raster order by (i, j).
    pub x_faces: Vec<Face>,
    /// Z-type faces (detect X errors), raster order by (i, j).
    pub z_faces: Vec<Face>,
    /// Support of the logical X̂: the left column.
    pub x_logical: Vec<usize>,
    /// Support of the logical Ẑ: the top row.
    pub z_logical: Vec<usize>,
    /// For each qubit, the indices (into `x_faces`) of the X faces
    /// containing it: two for bulk columns, one for the left/right columns.
    pub qubit_x_faces: Vec<Vec<usize>>,
}

/// Build the distance-`d` patch. `d` must be odd (the kept-boundary pattern
/// below assumes it).
pub fn build_patch(d: usize) -> CodePatch {
    assert!(d >= 1 && d % 2 == 1, "code distance must be odd, got {d}");
    let mut x_faces = Vec::new();
    let mut z_faces = Vec::new();
    for i in 0..=d {
        for j in 0..=d {
            let rows: Vec<usize> = [i.checked_sub(1), Some(i)]
                .into_iter()
                .flatten()
                .filter(|&r| r < d)
                .collect();
            let cols: Vec<usize> = [j.checked_sub(1), Some(j)]
                .into_iter()
                .flatten()
                .filter(|&c| c < d)
                .collect();
            let mut qubits: Vec<usize> =
                rows.iter().flat_map(|&r| cols.iter().map(move |&c| r * d + c)).collect();
            qubits.sort_unstable();
            if qubits.len() < 2 {
                continue; // corners
            }
            let is_x = (i + j) % 2 == 1;
            let interior = i >= 1 && i < d && j >= 1 && j < d;
            if !interior {
                // Horizontal boundaries keep only X faces, vertical boundaries
                // only Z faces, which is what makes Z-error chains terminate on
                // the left/right sides and X-error chains on the top/bottom.
                let keep = if i == 0 || i == d { is_x } else { !is_x };
                if !keep {
                    continue;
                }
            }
            let face = Face { i, j, qubits };
            if is_x {
                x_faces.push(face);
            } else {
                z_faces.push(face);
            }
        }
    }
    let mut qubit_x_faces = vec![Vec::new(); d * d];
    for (fi, f) in x_faces.iter().enumerate() {
        for &q in &f.qubits {
            qubit_x_faces[q].push(fi);
        }
    }
    CodePatch {
        d,
        x_faces,
        z_faces,
        x_logical: (0..d).map(|r| r * d).collect(),
        z_logical: (0..d).collect(),
        qubit_x_faces,
    }
}

impl CodePatch {
    pub fn n_qubits(&self) -> usize {
        self.d * self.d
    }

    /// X-face defect pattern (true = flipped stabilizer) produced by a
    /// Ẑ-type error with the given support.
    pub fn syndrome_of_support(&self, support: &[bool]) -> Vec<bool> {
        let mut syn = vec![false; self.x_faces.len()];
        for (q, &on) in support.iter().enumerate() {
            if on {
                for &f in &self.qubit_x_faces[q] {
                    syn[f] = !syn[f];
                }
            }
        }
        syn
    }

    /// Whether a Ẑ-type support acts as the logical Ẑ on the code space
    /// (given its syndrome is trivial): odd overlap with the left column.
    pub fn logical_class(&self, support: &[bool]) -> bool {
        self.x_logical.iter().filter(|&&q| support[q]).count() % 2 == 1
    }

    /// Column of a qubit index.
    pub fn col(&self, q: usize) -> usize {
        q % self.d
    }

    /// Row of a qubit index.
    pub fn row(&self, q: usize) -> usize {
        q / self.d
    }
}
