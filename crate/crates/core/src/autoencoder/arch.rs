//! Architecture description and the flat parameter layout derived from it.
//!
//! The network has 13 affine layers in a fixed declaration order:
//! three per-point MLP layers over 12-d input features, one layer after each
//! of the two graph max-pools, a two-layer head after the global max-pool
//! (final layer bias-free), and two three-layer folding MLPs. All hidden
//! layers use a leaky rectifier (slope 0.01); `h2`, `f1c` and `f2c` are
//! linear.

use crate::error::{Error, Result};

/// Per-point input width: the point itself plus its flattened 3x3 local
/// covariance.
pub const POINT_FEATURES: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArchSpec {
    pub latent_dim: usize,
    pub knn_k: usize,
    pub point_mlp: [usize; 3],
    pub graph1_dim: usize,
    pub graph2_dim: usize,
    pub head_hidden: usize,
    pub grid_side: usize,
    pub fold_hidden: [usize; 2],
}

impl Default for ArchSpec {
    fn default() -> Self {
        Self {
            latent_dim: 512,
            knn_k: 16,
            point_mlp: [64, 64, 64],
            graph1_dim: 128,
            graph2_dim: 1024,
            head_hidden: 512,
            grid_side: 45,
            fold_hidden: [512, 512],
        }
    }
}

/// One affine layer's place in the flat parameter vector: a row-major
/// `rows x cols` weight block, then `rows` bias entries when present.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LayerShape {
    pub name: &'static str,
    pub rows: usize,
    pub cols: usize,
    pub bias: bool,
    pub offset: usize,
}

impl LayerShape {
    pub fn weight_len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn len(&self) -> usize {
        self.weight_len() + if self.bias { self.rows } else { 0 }
    }
}

impl ArchSpec {
    /// Compact configuration for desk-scale runs.
    pub fn small() -> Self {
        Self {
            latent_dim: 64,
            knn_k: 8,
            point_mlp: [32, 32, 32],
            graph1_dim: 64,
            graph2_dim: 128,
            head_hidden: 128,
            grid_side: 16,
            fold_hidden: [128, 128],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let widths = [
            self.latent_dim,
            self.knn_k,
            self.point_mlp[0],
            self.point_mlp[1],
            self.point_mlp[2],
            self.graph1_dim,
            self.graph2_dim,
            self.head_hidden,
            self.fold_hidden[0],
            self.fold_hidden[1],
        ];
        if widths.contains(&0) {
            return Err(Error::Degenerate("all architecture widths must be >= 1".into()));
        }
        if self.grid_side < 2 {
            return Err(Error::Degenerate("grid_side must be >= 2".into()));
        }
        Ok(())
    }

    /// Number of decoder seed points (`grid_side` squared).
    pub fn grid_points(&self) -> usize {
        self.grid_side * self.grid_side
    }

    /// The folding seed grid, row-major over `[-0.3, 0.3]` squared.
    pub fn grid(&self) -> Vec<[f64; 2]> {
        let side = self.grid_side;
        let coord = |t: usize| -0.3 + 0.6 * t as f64 / (side - 1) as f64;
        let mut out = Vec::with_capacity(side * side);
        for r in 0..side {
            for c in 0..side {
                out.push([coord(r), coord(c)]);
            }
        }
        out
    }

    /// The 13 layers in declaration order with flat-vector offsets.
    pub fn layers(&self) -> Vec<LayerShape> {
        let dims: [(&'static str, usize, usize, bool); 13] = [
            ("pm1", self.point_mlp[0], POINT_FEATURES, true),
            ("pm2", self.point_mlp[1], self.point_mlp[0], true),
            ("pm3", self.point_mlp[2], self.point_mlp[1], true),
            ("g1", self.graph1_dim, self.point_mlp[2], true),
            ("g2", self.graph2_dim, self.graph1_dim, true),
            ("h1", self.head_hidden, self.graph2_dim, true),
            ("h2", self.latent_dim, self.head_hidden, false),
            ("f1a", self.fold_hidden[0], self.latent_dim + 2, true),
            ("f1b", self.fold_hidden[1], self.fold_hidden[0], true),
            ("f1c", 3, self.fold_hidden[1], true),
            ("f2a", self.fold_hidden[0], self.latent_dim + 3, true),
            ("f2b", self.fold_hidden[1], self.fold_hidden[0], true),
            ("f2c", 3, self.fold_hidden[1], true),
        ];
        let mut offset = 0;
        dims.map(|(name, rows, cols, bias)| {
            let layer = LayerShape {
                name,
                rows,
                cols,
                bias,
                offset,
            };
            offset += layer.len();
            layer
        })
        .to_vec()
    }

    pub fn param_count(&self) -> usize {
        self.layers().iter().map(LayerShape::len).sum()
    }

    /// Fixed-order u32 encoding used by checkpoints and fingerprints.
    pub fn field_words(&self) -> [u32; 11] {
        [
            self.latent_dim as u32,
            self.knn_k as u32,
            self.point_mlp[0] as u32,
            self.point_mlp[1] as u32,
            self.point_mlp[2] as u32,
            self.graph1_dim as u32,
            self.graph2_dim as u32,
            self.head_hidden as u32,
            self.grid_side as u32,
            self.fold_hidden[0] as u32,
            self.fold_hidden[1] as u32,
        ]
    }

    pub fn from_field_words(w: &[u32; 11]) -> Self {
        Self {
            latent_dim: w[0] as usize,
            knn_k: w[1] as usize,
            point_mlp: [w[2] as usize, w[3] as usize, w[4] as usize],
            graph1_dim: w[5] as usize,
            graph2_dim: w[6] as usize,
            head_hidden: w[7] as usize,
            grid_side: w[8] as usize,
            fold_hidden: [w[9] as usize, w[10] as usize],
        }
    }
}
