//! Network geometry: freeway and urban Manhattan layouts, VUE drops with
//! minimum-gap headways, strongest-signal association, LOS central angles,
//! and minimum-image (wraparound) distances.
//!
//! Freeway: BSs in a row on one side of the road, all lanes on the other
//! side, wrap along the road axis. Manhattan: a 3x3 block grid with BSs at
//! block centers and four-lane streets between blocks, wrapped as a torus.
//! VUEs circulate counterclockwise around the blocks; on the freeway the
//! lanes nearer the BSs head one way and the farther lanes the other.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{path_gain, LinkState};
use crate::correlation::{spatial_matrix_unvalidated, wrap_angle, AngularProfile, ArrayGeometry};
use crate::error::{Result, SimError};
use crate::seed::{stage, SeedPath};
use crate::training::{assign_pilots, PilotAssignment};

use std::f64::consts::PI;

/// Which Table-style scenario a layout instantiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Freeway,
    Manhattan,
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scenario::Freeway => write!(f, "freeway"),
            Scenario::Manhattan => write!(f, "manhattan"),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BaseStation {
    pub pos: [f64; 2],
    pub height: f64,
    /// ULA orientation angle.
    pub alpha: f64,
}

/// A straight lane centerline with a travel direction; positions wrap at
/// `length` (the wrap period along the lane).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Lane {
    pub origin: [f64; 2],
    pub direction: [f64; 2],
    pub length: f64,
    pub width: f64,
}

impl Lane {
    pub fn point_at(&self, s: f64) -> [f64; 2] {
        [
            self.origin[0] + self.direction[0] * s,
            self.origin[1] + self.direction[1] * s,
        ]
    }

    /// Travel direction angle γ.
    pub fn gamma(&self) -> f64 {
        wrap_angle(self.direction[1].atan2(self.direction[0]))
    }
}

/// Wraparound convention mimicking an infinite network.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub enum WrapSpec {
    /// Wrap along x with the given period (freeway).
    AxisX { period: f64 },
    /// Torus over both horizontal dimensions (Manhattan grid).
    Torus { period_x: f64, period_y: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetworkLayout {
    pub scenario: Scenario,
    pub bs: Vec<BaseStation>,
    pub lanes: Vec<Lane>,
    pub wrap: WrapSpec,
}

/// Freeway geometry knobs (defaults follow the standard parameter table).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FreewayParams {
    pub n_bs: usize,
    pub isd: f64,
    /// Distance from the BS row to the nearest road edge.
    pub bs_setback: f64,
    pub bs_height: f64,
    pub lanes: usize,
    pub lane_width: f64,
    pub alpha: f64,
}

impl Default for FreewayParams {
    fn default() -> Self {
        FreewayParams {
            n_bs: 2,
            isd: 1732.0,
            bs_setback: 35.0,
            bs_height: 35.0,
            lanes: 6,
            lane_width: 4.0,
            alpha: 0.0,
        }
    }
}

/// Manhattan grid geometry knobs.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ManhattanParams {
    pub grid: usize,
    pub block_x: f64,
    pub block_y: f64,
    pub street_width: f64,
    pub sidewalk_width: f64,
    pub bs_height: f64,
    pub lanes_per_street: usize,
    pub lane_width: f64,
    pub alpha: f64,
}

impl Default for ManhattanParams {
    fn default() -> Self {
        ManhattanParams {
            grid: 3,
            block_x: 250.0,
            block_y: 433.0,
            street_width: 20.0,
            sidewalk_width: 3.0,
            bs_height: 25.0,
            lanes_per_street: 4,
            lane_width: 3.5,
            alpha: 0.0,
        }
    }
}

/// Freeway layout: BSs at y = -setback spaced by the ISD, lanes at positive
/// y indexed outward from the BS side. The nearer half of the lanes travels
/// in -x, the farther half in +x.
pub fn build_freeway(p: &FreewayParams) -> Result<NetworkLayout> {
    if p.n_bs < 1 || p.lanes == 0 {
        return Err(SimError::Config(format!(
            "freeway needs at least one BS and one lane, got {} BS, {} lanes",
            p.n_bs, p.lanes
        )));
    }
    if !(p.isd > 0.0) || !(p.lane_width > 0.0) {
        return Err(SimError::Config("freeway ISD and lane width must be positive".into()));
    }
    let period = p.n_bs as f64 * p.isd;
    let bs = (0..p.n_bs)
        .map(|i| BaseStation {
            pos: [i as f64 * p.isd, -p.bs_setback],
            height: p.bs_height,
            alpha: p.alpha,
        })
        .collect();
    let lanes = (0..p.lanes)
        .map(|j| {
            let y = (j as f64 + 0.5) * p.lane_width;
            let toward_minus_x = j < p.lanes / 2; // nearer lanes go left
            Lane {
                origin: [0.0, y],
                direction: if toward_minus_x { [-1.0, 0.0] } else { [1.0, 0.0] },
                length: period,
                width: p.lane_width,
            }
        })
        .collect();
    Ok(NetworkLayout {
        scenario: Scenario::Freeway,
        bs,
        lanes,
        wrap: WrapSpec::AxisX { period },
    })
}

/// Manhattan layout: `grid × grid` blocks with streets between them, BSs at
/// block centers, torus wrap over the full extent. Lane directions follow a
/// counterclockwise circulation around each block.
pub fn build_manhattan(p: &ManhattanParams) -> Result<NetworkLayout> {
    if p.grid < 1 || p.lanes_per_street == 0 {
        return Err(SimError::Config(format!(
            "manhattan grid needs blocks and lanes, got grid={}, lanes={}",
            p.grid, p.lanes_per_street
        )));
    }
    let roadway = p.lanes_per_street as f64 * p.lane_width + 2.0 * p.sidewalk_width;
    if roadway > p.street_width + 1e-9 {
        return Err(SimError::Config(format!(
            "lanes plus sidewalks ({roadway} m) exceed street width ({} m)",
            p.street_width
        )));
    }
    let pitch_x = p.block_x + p.street_width;
    let pitch_y = p.block_y + p.street_width;
    let period_x = p.grid as f64 * pitch_x;
    let period_y = p.grid as f64 * pitch_y;

    let mut bs = Vec::with_capacity(p.grid * p.grid);
    for j in 0..p.grid {
        for i in 0..p.grid {
            bs.push(BaseStation {
                pos: [
                    i as f64 * pitch_x + 0.5 * p.street_width + 0.5 * p.block_x,
                    j as f64 * pitch_y + 0.5 * p.street_width + 0.5 * p.block_y,
                ],
                height: p.bs_height,
                alpha: p.alpha,
            });
        }
    }

    // Street centerlines sit at multiples of the pitch. Lane offsets are
    // symmetric around the centerline; the side adjacent to a block carries
    // the direction that circles that block counterclockwise.
    let half = (p.lanes_per_street as f64 - 1.0) / 2.0;
    let mut lanes = Vec::new();
    for i in 0..p.grid {
        let x_c = i as f64 * pitch_x;
        for l in 0..p.lanes_per_street {
            let offset = (l as f64 - half) * p.lane_width;
            // East side (offset > 0): the block to the east sees this street
            // as its west edge -> travel -y. West side: +y.
            let dir = if offset > 0.0 { [0.0, -1.0] } else { [0.0, 1.0] };
            lanes.push(Lane {
                origin: [x_c + offset, 0.0],
                direction: dir,
                length: period_y,
                width: p.lane_width,
            });
        }
    }
    for j in 0..p.grid {
        let y_c = j as f64 * pitch_y;
        for l in 0..p.lanes_per_street {
            let offset = (l as f64 - half) * p.lane_width;
            // North side (offset > 0): the block above sees this street as
            // its south edge -> travel +x. South side: -x.
            let dir = if offset > 0.0 { [1.0, 0.0] } else { [-1.0, 0.0] };
            lanes.push(Lane {
                origin: [0.0, y_c + offset],
                direction: dir,
                length: period_x,
                width: p.lane_width,
            });
        }
    }

    Ok(NetworkLayout {
        scenario: Scenario::Manhattan,
        bs,
        lanes,
        wrap: WrapSpec::Torus { period_x, period_y },
    })
}

fn min_image(delta: f64, period: f64) -> f64 {
    (delta + 0.5 * period).rem_euclid(period) - 0.5 * period
}

/// Minimum-image horizontal displacement from `a` to `b`.
pub fn wrap_displacement(layout: &NetworkLayout, a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let dx = b[0] - a[0];
    let dy = b[1] - a[1];
    match layout.wrap {
        WrapSpec::AxisX { period } => [min_image(dx, period), dy],
        WrapSpec::Torus { period_x, period_y } => {
            [min_image(dx, period_x), min_image(dy, period_y)]
        }
    }
}

/// Minimum-image 3D distance between two points given as (x, y, height).
pub fn wrap_distance(layout: &NetworkLayout, a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = wrap_displacement(layout, [a[0], a[1]], [b[0], b[1]]);
    let dz = b[2] - a[2];
    (d[0] * d[0] + d[1] * d[1] + dz * dz).sqrt()
}

/// LOS central angles of one link: `φ_c` is the azimuth of the BS as seen
/// from the VUE (minimum-image), and `θ_c = φ_c + π` wrapped to [-π, π).
pub fn central_angles(
    bs: &BaseStation,
    vue_pos: [f64; 2],
    layout: &NetworkLayout,
) -> Result<(f64, f64)> {
    let d = wrap_displacement(layout, vue_pos, bs.pos);
    if d[0].hypot(d[1]) < 1e-9 {
        return Err(SimError::CoincidentPositions);
    }
    let phi_c = wrap_angle(d[1].atan2(d[0]));
    let theta_c = wrap_angle(phi_c + PI);
    Ok((phi_c, theta_c))
}

/// One dropped vehicle user.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Vue {
    pub pos: [f64; 2],
    pub lane: usize,
    /// Travel direction of the lane.
    pub gamma: f64,
    /// Arclength along the lane.
    pub s: f64,
}

/// Drop VUEs on every lane: a renewal process with headway
/// `2.5 v + Exp(mean)` whose long-run linear density matches `density`
/// (per meter per lane). All gaps, including the wrap gap, respect the
/// minimum 2.5 v.
pub fn drop_vues<R: Rng + ?Sized>(
    layout: &NetworkLayout,
    density: f64,
    v: f64,
    rng: &mut R,
) -> Result<Vec<Vue>> {
    if !(density > 0.0) {
        return Err(SimError::Domain(format!(
            "VUE density must be positive, got {density}"
        )));
    }
    let min_gap = 2.5 * v;
    let mean_headway = 1.0 / density;
    let exp_mean = mean_headway - min_gap;
    if exp_mean <= 0.0 {
        return Err(SimError::InfeasibleDensity {
            mean_headway_m: mean_headway,
            min_gap_m: min_gap,
        });
    }
    let exp = Exp::new(1.0 / exp_mean).expect("positive rate");
    let mut vues = Vec::new();
    for (lane_idx, lane) in layout.lanes.iter().enumerate() {
        let start: f64 = rng.random_range(0.0..lane.length);
        let mut offsets = vec![0.0f64];
        loop {
            let next = offsets.last().unwrap() + min_gap + exp.sample(rng);
            if next >= lane.length {
                break;
            }
            offsets.push(next);
        }
        // Close the ring: the gap from the last VUE back to the first must
        // also respect the minimum.
        while offsets.len() > 1 && lane.length - offsets.last().unwrap() < min_gap {
            offsets.pop();
        }
        for off in offsets {
            let s = (start + off).rem_euclid(lane.length);
            let raw = lane.point_at(s);
            let pos = wrap_position(layout, raw);
            vues.push(Vue {
                pos,
                lane: lane_idx,
                gamma: lane.gamma(),
                s,
            });
        }
    }
    Ok(vues)
}

/// Fold a raw position into the fundamental wrap domain.
fn wrap_position(layout: &NetworkLayout, pos: [f64; 2]) -> [f64; 2] {
    match layout.wrap {
        WrapSpec::AxisX { period } => [pos[0].rem_euclid(period), pos[1]],
        WrapSpec::Torus { period_x, period_y } => {
            [pos[0].rem_euclid(period_x), pos[1].rem_euclid(period_y)]
        }
    }
}

/// Associate each VUE with the BS of strongest received signal
/// (path loss plus shadow fading); ties break toward the lowest BS index.
pub fn associate(
    layout: &NetworkLayout,
    vues: &[Vue],
    shadows: &DMatrix<f64>,
    vue_height: f64,
) -> Result<Vec<usize>> {
    let mut serving = Vec::with_capacity(vues.len());
    for (k, vue) in vues.iter().enumerate() {
        let mut best = 0usize;
        let mut best_gain = f64::NEG_INFINITY;
        for (l, bs) in layout.bs.iter().enumerate() {
            let dist = wrap_distance(
                layout,
                [vue.pos[0], vue.pos[1], vue_height],
                [bs.pos[0], bs.pos[1], bs.height],
            );
            let gain = path_gain(dist, shadows[(k, l)])?.gain_db;
            if gain > best_gain {
                best_gain = gain;
                best = l;
            }
        }
        serving.push(best);
    }
    Ok(serving)
}

/// Everything the drop evaluator needs about one realized network.
#[derive(Clone, Debug)]
pub struct NetworkDrop {
    pub layout: NetworkLayout,
    pub vues: Vec<Vue>,
    pub serving: Vec<usize>,
    /// Shadow fading in dB per (VUE, BS).
    pub shadows: DMatrix<f64>,
    pub pilots: PilotAssignment,
    /// Per-BS, per-VUE link state: `links[bs][vue]`.
    pub links: Vec<Vec<LinkState>>,
    pub powers: Vec<f64>,
    pub v: f64,
}

impl NetworkDrop {
    pub fn n_users(&self) -> usize {
        self.vues.len()
    }

    pub fn n_bs(&self) -> usize {
        self.layout.bs.len()
    }

    /// Users served by BS l, in ascending user order.
    pub fn served_by(&self, l: usize) -> Vec<usize> {
        (0..self.vues.len()).filter(|&k| self.serving[k] == l).collect()
    }
}

/// Scenario-independent parameters of a drop.
#[derive(Clone, Copy, Debug)]
pub struct DropSpec {
    pub v: f64,
    pub kappa_t: f64,
    pub kappa_r: f64,
    pub density: f64,
    pub tx_power_w: f64,
    pub array: ArrayGeometry,
    pub n_pilots: usize,
    pub shadow_sigma_db: f64,
    pub vue_antenna_height: f64,
}

/// Realize one network drop: place VUEs, draw shadows, associate, assign
/// pilots, and build the per-link state (path gain, spatial correlation and
/// its square root, scattering profile).
pub fn generate_drop(layout: &NetworkLayout, spec: &DropSpec, seed: SeedPath) -> Result<NetworkDrop> {
    let vues = drop_vues(
        layout,
        spec.density,
        spec.v,
        &mut seed.child(stage::GEOMETRY).rng(),
    )?;
    let k_users = vues.len();
    let l_bs = layout.bs.len();
    if k_users == 0 {
        return Err(SimError::Config("drop produced no VUEs".into()));
    }

    let mut shadow_rng = seed.child(stage::SHADOW).rng();
    let shadows = DMatrix::from_fn(k_users, l_bs, |_, _| {
        let z: f64 = shadow_rng.sample(rand_distr::StandardNormal);
        z * spec.shadow_sigma_db
    });

    let serving = associate(layout, &vues, &shadows, spec.vue_antenna_height)?;
    let pilots = assign_pilots(
        k_users,
        spec.n_pilots,
        &mut seed.child(stage::PILOT_ASSIGN).rng(),
    )?;

    // Link construction dominates drop setup (one eigendecomposition per
    // link); parallelize deterministically over (bs, vue) pairs.
    let pairs: Vec<(usize, usize)> = (0..l_bs)
        .flat_map(|l| (0..k_users).map(move |k| (l, k)))
        .collect();
    let built: Vec<Result<LinkState>> = pairs
        .par_iter()
        .map(|&(l, k)| {
            let bs = &layout.bs[l];
            let vue = &vues[k];
            let (phi_c, theta_c) = central_angles(bs, vue.pos, layout)?;
            let profile = AngularProfile::new(
                spec.kappa_t,
                spec.kappa_r,
                phi_c,
                theta_c,
                vue.gamma,
                bs.alpha,
            )?;
            // PSD is enforced by the square-root factorization inside
            // LinkState::new; skipping the standalone check here halves the
            // eigendecomposition cost of a drop.
            let r0 = spatial_matrix_unvalidated(&profile, &spec.array)?;
            let dist = wrap_distance(
                layout,
                [vue.pos[0], vue.pos[1], spec.vue_antenna_height],
                [bs.pos[0], bs.pos[1], bs.height],
            );
            let large_scale = path_gain(dist, shadows[(k, l)])?;
            LinkState::new(large_scale, r0, profile)
        })
        .collect();

    let mut links: Vec<Vec<LinkState>> = Vec::with_capacity(l_bs);
    let mut iter = built.into_iter();
    for _ in 0..l_bs {
        let mut row = Vec::with_capacity(k_users);
        for _ in 0..k_users {
            row.push(iter.next().unwrap()?);
        }
        links.push(row);
    }

    Ok(NetworkDrop {
        layout: layout.clone(),
        vues,
        serving,
        shadows,
        pilots,
        links,
        powers: vec![spec.tx_power_w; k_users],
        v: spec.v,
    })
}

/// Serializable snapshot of a layout (and optionally a drop) for plotting
/// and auditing.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LayoutDump {
    pub scenario: Scenario,
    pub bs: Vec<BaseStation>,
    pub lanes: Vec<Lane>,
    pub wrap: WrapSpec,
    pub vues: Vec<Vue>,
    pub serving: Vec<usize>,
}

impl LayoutDump {
    pub fn from_layout(layout: &NetworkLayout) -> Self {
        LayoutDump {
            scenario: layout.scenario,
            bs: layout.bs.clone(),
            lanes: layout.lanes.clone(),
            wrap: layout.wrap,
            vues: Vec::new(),
            serving: Vec::new(),
        }
    }

    pub fn from_drop(drop: &NetworkDrop) -> Self {
        LayoutDump {
            scenario: drop.layout.scenario,
            bs: drop.layout.bs.clone(),
            lanes: drop.layout.lanes.clone(),
            wrap: drop.layout.wrap,
            vues: drop.vues.clone(),
            serving: drop.serving.clone(),
        }
    }
}
