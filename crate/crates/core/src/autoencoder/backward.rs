//! Reverse-mode differentiation of the reconstruction loss.
//!
//! The loss is piecewise smooth: max-pools and Chamfer correspondences
//! select a smooth piece during the forward pass, and the backward pass
//! differentiates that piece exactly, holding every argmax and
//! correspondence fixed at its forward value.

use super::arch::LayerShape;
use super::forward::{forward_prepared, prepare_cloud, slope_of, PreparedCloud};
use super::params::{AutoencoderParams, LayerView};
use crate::error::Result;
use crate::geometry::PointCloud;

fn affine_bwd(
    shape: &LayerShape,
    view: &LayerView<'_>,
    grads: &mut [f64],
    x: &[f64],
    dy: &[f64],
    mut dx: Option<&mut [f64]>,
) {
    let (rows, cols) = (shape.rows, shape.cols);
    let layer_grads = &mut grads[shape.offset..shape.offset + shape.len()];
    let (gw, gb) = layer_grads.split_at_mut(shape.weight_len());
    for r in 0..rows {
        let dyr = dy[r];
        if dyr == 0.0 {
            continue;
        }
        let grow = &mut gw[r * cols..(r + 1) * cols];
        for (g, &xv) in grow.iter_mut().zip(x) {
            *g += dyr * xv;
        }
        if shape.bias {
            gb[r] += dyr;
        }
        if let Some(dx) = dx.as_deref_mut() {
            let wrow = &view.w[r * cols..(r + 1) * cols];
            for (d, &wv) in dx.iter_mut().zip(wrow) {
                *d += wv * dyr;
            }
        }
    }
}

/// Backward through one shared layer applied per point, undoing the leaky
/// rectification via the stored post-activation signs. Rows whose upstream
/// gradient is all zero contribute nothing and are skipped.
#[allow(clippy::too_many_arguments)]
fn layer_bwd_over_points(
    shape: &LayerShape,
    view: &LayerView<'_>,
    grads: &mut [f64],
    x: &[f64],
    post: &[f64],
    dpost: &[f64],
    mut dx: Option<&mut [f64]>,
    n: usize,
) {
    let (rows, cols) = (shape.rows, shape.cols);
    let mut dpre = vec![0.0; rows];
    for i in 0..n {
        let dpost_row = &dpost[i * rows..(i + 1) * rows];
        if dpost_row.iter().all(|&v| v == 0.0) {
            continue;
        }
        for (r, d) in dpre.iter_mut().enumerate() {
            *d = dpost_row[r] * slope_of(post[i * rows + r]);
        }
        let x_row = &x[i * cols..(i + 1) * cols];
        match dx.as_deref_mut() {
            Some(dx) => affine_bwd(
                shape,
                view,
                grads,
                x_row,
                &dpre,
                Some(&mut dx[i * cols..(i + 1) * cols]),
            ),
            None => affine_bwd(shape, view, grads, x_row, &dpre, None),
        }
    }
}

fn mask_in_place(d: &mut [f64], post: &[f64]) {
    for (v, &p) in d.iter_mut().zip(post) {
        *v *= slope_of(p);
    }
}

pub(crate) struct GradEval {
    pub loss: f64,
    pub grads: Vec<f64>,
}

pub(crate) fn reconstruction_grad(
    params: &AutoencoderParams,
    prep: &PreparedCloud,
) -> Result<GradEval> {
    let (enc, dec, bits) = forward_prepared(params, prep)?;
    let arch = &params.arch;
    let shapes = arch.layers();
    let mut grads = vec![0.0; arch.param_count()];
    let n = prep.cloud.len();
    let m = arch.grid_points();
    let latent = arch.latent_dim;
    let (fh0, fh1) = (arch.fold_hidden[0], arch.fold_hidden[1]);
    let grid = arch.grid();

    let mut dz = vec![0.0; latent];
    let mut ds1 = bits.ds1.clone();
    let mut dta = vec![0.0; fh0];
    let mut dtb = vec![0.0; fh1];

    let mut input = vec![0.0; latent + 3];
    input[..latent].copy_from_slice(&enc.z);
    let mut din = vec![0.0; latent + 3];
    for i in 0..m {
        let dy = &bits.ds2[i];
        if *dy == [0.0; 3] {
            continue;
        }
        let tb_row = &dec.t2b[i * fh1..(i + 1) * fh1];
        dtb.fill(0.0);
        affine_bwd(&shapes[12], &params.layer(12), &mut grads, tb_row, dy, Some(&mut dtb));
        mask_in_place(&mut dtb, tb_row);
        let ta_row = &dec.t2a[i * fh0..(i + 1) * fh0];
        dta.fill(0.0);
        affine_bwd(&shapes[11], &params.layer(11), &mut grads, ta_row, &dtb, Some(&mut dta));
        mask_in_place(&mut dta, ta_row);
        input[latent..].copy_from_slice(&dec.s1[i]);
        din.fill(0.0);
        affine_bwd(&shapes[10], &params.layer(10), &mut grads, &input, &dta, Some(&mut din));
        for (acc, &d) in dz.iter_mut().zip(&din[..latent]) {
            *acc += d;
        }
        for a in 0..3 {
            ds1[i][a] += din[latent + a];
        }
    }

    let mut in1 = vec![0.0; latent + 2];
    in1[..latent].copy_from_slice(&enc.z);
    let mut din1 = vec![0.0; latent + 2];
    for i in 0..m {
        let dy = &ds1[i];
        if *dy == [0.0; 3] {
            continue;
        }
        let tb_row = &dec.t1b[i * fh1..(i + 1) * fh1];
        dtb.fill(0.0);
        affine_bwd(&shapes[9], &params.layer(9), &mut grads, tb_row, dy, Some(&mut dtb));
        mask_in_place(&mut dtb, tb_row);
        let ta_row = &dec.t1a[i * fh0..(i + 1) * fh0];
        dta.fill(0.0);
        affine_bwd(&shapes[8], &params.layer(8), &mut grads, ta_row, &dtb, Some(&mut dta));
        mask_in_place(&mut dta, ta_row);
        in1[latent] = grid[i][0];
        in1[latent + 1] = grid[i][1];
        din1.fill(0.0);
        affine_bwd(&shapes[7], &params.layer(7), &mut grads, &in1, &dta, Some(&mut din1));
        for (acc, &d) in dz.iter_mut().zip(&din1[..latent]) {
            *acc += d;
        }
    }

    let mut dh = vec![0.0; arch.head_hidden];
    affine_bwd(&shapes[6], &params.layer(6), &mut grads, &enc.h, &dz, Some(&mut dh));
    mask_in_place(&mut dh, &enc.h);
    let g2w = arch.graph2_dim;
    let mut dgmax = vec![0.0; g2w];
    affine_bwd(&shapes[5], &params.layer(5), &mut grads, &enc.gmax, &dh, Some(&mut dgmax));

    let mut da5 = vec![0.0; n * g2w];
    for (f, &d) in dgmax.iter().enumerate() {
        da5[enc.garg[f] as usize * g2w + f] += d;
    }
    let g1w = arch.graph1_dim;
    let mut dp2 = vec![0.0; n * g1w];
    layer_bwd_over_points(
        &shapes[4],
        &params.layer(4),
        &mut grads,
        &enc.p2,
        &enc.a5,
        &da5,
        Some(&mut dp2),
        n,
    );

    let pm2w = arch.point_mlp[2];
    let mut da4 = vec![0.0; n * g1w];
    for i in 0..n {
        for f in 0..g1w {
            let src = i * g1w + f;
            da4[enc.arg2[src] as usize * g1w + f] += dp2[src];
        }
    }
    let mut dp1 = vec![0.0; n * pm2w];
    layer_bwd_over_points(
        &shapes[3],
        &params.layer(3),
        &mut grads,
        &enc.p1,
        &enc.a4,
        &da4,
        Some(&mut dp1),
        n,
    );

    let mut da3 = vec![0.0; n * pm2w];
    for i in 0..n {
        for f in 0..pm2w {
            let src = i * pm2w + f;
            da3[enc.arg1[src] as usize * pm2w + f] += dp1[src];
        }
    }
    let pm1w = arch.point_mlp[0];
    let mut da2 = vec![0.0; n * arch.point_mlp[1]];
    layer_bwd_over_points(
        &shapes[2],
        &params.layer(2),
        &mut grads,
        &enc.a2,
        &enc.a3,
        &da3,
        Some(&mut da2),
        n,
    );
    let mut da1 = vec![0.0; n * pm1w];
    layer_bwd_over_points(
        &shapes[1],
        &params.layer(1),
        &mut grads,
        &enc.a1,
        &enc.a2,
        &da2,
        Some(&mut da1),
        n,
    );
    layer_bwd_over_points(
        &shapes[0],
        &params.layer(0),
        &mut grads,
        &prep.features,
        &enc.a1,
        &da1,
        None,
        n,
    );

    Ok(GradEval {
        loss: bits.loss,
        grads,
    })
}

/// Gradient of [`reconstruction_loss`](super::reconstruction_loss) for one
/// cloud with respect to every parameter, Chamfer correspondences and pool
/// argmaxes held fixed at their forward values.
pub fn backward(params: &AutoencoderParams, cloud: &PointCloud) -> Result<Vec<f64>> {
    let prep = prepare_cloud(params.arch.knn_k, cloud)?;
    Ok(reconstruction_grad(params, &prep)?.grads)
}
