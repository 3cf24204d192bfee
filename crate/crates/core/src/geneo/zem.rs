use crate::mesh::{OverlappingDecomposition, StructuredGrid};

/// Local kernel vectors of the Neumann operator of subdomain `j`: the constant
/// for scalar problems, otherwise three translations and three rotations
/// about the centroid of the subdomain nodes. Each has unit 2-norm.
pub fn zem_vectors(grid: &StructuredGrid, decomp: &OverlappingDecomposition, ncomp: usize, j: usize) -> Vec<Vec<f64>> {
    let nodes = &decomp.subdomain_nodes[j];
    let n = nodes.len();
    let mut modes: Vec<Vec<f64>> = if ncomp == 1 {
        vec![vec![1.0; n]]
    } else {
        let mut c = [0.0; 3];
        for &v in nodes {
            for d in 0..3 {
                c[d] += grid.nodes()[v][d];
            }
        }
        c.iter_mut().for_each(|x| *x /= n as f64);
        let mut m = vec![vec![0.0; 3 * n]; 6];
        for (l, &v) in nodes.iter().enumerate() {
            let x = grid.nodes()[v];
            let r = [x[0] - c[0], x[1] - c[1], x[2] - c[2]];
            for d in 0..3 {
                m[d][3 * l + d] = 1.0;
            }
            // ω × r for ω = e_x, e_y, e_z.
            m[3][3 * l + 1] = -r[2];
            m[3][3 * l + 2] = r[1];
            m[4][3 * l] = r[2];
            m[4][3 * l + 2] = -r[0];
            m[5][3 * l] = -r[1];
            m[5][3 * l + 1] = r[0];
        }
        m
    };
    for v in &mut modes {
        let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= s);
    }
    modes
}
