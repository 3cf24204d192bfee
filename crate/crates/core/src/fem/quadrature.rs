use crate::error::{Error, Result};

/// Tensor-product Gauss-Legendre rule on `[-1,1]^dim`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

/// 1D Gauss-Legendre points and weights on `[-1,1]`.
pub fn gauss_legendre(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let (p, w): (&[f64], &[f64]) = match order {
        1 => (&[0.0], &[2.0]),
        2 => {
            const A: f64 = 0.577_350_269_189_625_8;
            (&[-A, A], &[1.0, 1.0])
        }
        3 => {
            const A: f64 = 0.774_596_669_241_483_4;
            (&[-A, 0.0, A], &[5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
        }
        4 => {
            const A: f64 = 0.339_981_043_584_856_3;
            const B: f64 = 0.861_136_311_594_052_6;
            const WA: f64 = 0.652_145_154_862_546_1;
            const WB: f64 = 0.347_854_845_137_453_9;
            (&[-B, -A, A, B], &[WB, WA, WA, WB])
        }
        5 => {
            const A: f64 = 0.538_469_310_105_683_1;
            const B: f64 = 0.906_179_845_938_664;
            const W0: f64 = 0.568_888_888_888_888_9;
            const WA: f64 = 0.478_628_670_499_366_5;
            const WB: f64 = 0.236_926_885_056_189_1;
            (&[-B, -A, 0.0, A, B], &[WB, WA, W0, WA, WB])
        }
        _ => return Err(Error::invalid(format!("Gauss order {order} not available (1..=5)"))),
    };
    Ok((p.to_vec(), w.to_vec()))
}

impl QuadratureRule {
    /// `order³` points on the reference hexahedron.
    pub fn hex(order: usize) -> Result<Self> {
        let (p, w) = gauss_legendre(order)?;
        let mut points = Vec::with_capacity(order.pow(3));
        let mut weights = Vec::with_capacity(order.pow(3));
        for k in 0..order {
            for j in 0..order {
                for i in 0..order {
                    points.push([p[i], p[j], p[k]]);
                    weights.push(w[i] * w[j] * w[k]);
                }
            }
        }
        Ok(Self { points, weights })
    }

    /// `order²` points on the square `[-1,1]²`, stored with a zero third coordinate.
    pub fn square(order: usize) -> Result<Self> {
        let (p, w) = gauss_legendre(order)?;
        let mut points = Vec::with_capacity(order * order);
        let mut weights = Vec::with_capacity(order * order);
        for j in 0..order {
            for i in 0..order {
                points.push([p[i], p[j], 0.0]);
                weights.push(w[i] * w[j]);
            }
        }
        Ok(Self { points, weights })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
