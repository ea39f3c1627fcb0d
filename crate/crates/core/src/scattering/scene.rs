use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::numerics::RngStream;
use crate::{Error, Result, C64};

/// Stream id reserved for scatterer placement.
const MEDIUM_STREAM: u64 = 0x6d65_6469_756d;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn polar(radius: f64, angle_rad: f64) -> Self {
        Self::new(radius * angle_rad.cos(), radius * angle_rad.sin())
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// `count` antennas evenly spaced on a circular arc from `start_deg` to
/// `end_deg` inclusive (a single antenna sits at `start_deg`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcSpec {
    pub count: usize,
    pub start_deg: f64,
    pub end_deg: f64,
}

impl ArcSpec {
    pub fn angles_deg(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start_deg],
            n => (0..n)
                .map(|i| self.start_deg + (self.end_deg - self.start_deg) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

/// Random medium of point scatterers placed in an annulus around the grid.
/// Radii are multiples of the grid circumradius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MediumParams {
    pub count: usize,
    pub seed: u64,
    pub annulus: [f64; 2],
    /// Complex scattering strength `t_m` as `[re, im]`.
    pub strength: [f64; 2],
    /// Minimum pairwise spacing in wavelengths.
    #[serde(default = "default_min_spacing")]
    pub min_spacing: f64,
}

fn default_min_spacing() -> f64 {
    0.05
}

impl Default for MediumParams {
    fn default() -> Self {
        Self {
            count: 64,
            seed: 7,
            annulus: [1.5, 3.0],
            strength: [0.0, 1.5],
            min_spacing: default_min_spacing(),
        }
    }
}

/// Serializable description from which a [`Scene`] is built. Missing
/// fields take their defaults.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneParams {
    /// Wavelength in meters.
    pub wavelength: f64,
    /// Grid dimensions `[nx, ny]`.
    pub grid: [usize; 2],
    /// Cell side as a fraction of the wavelength.
    pub resolution_fraction: f64,
    pub tx: ArcSpec,
    pub rx: ArcSpec,
    /// Antenna ring radius as a multiple of the grid side length.
    #[serde(default = "default_ring_factor")]
    pub ring_radius_factor: f64,
    pub medium: MediumParams,
}

fn default_ring_factor() -> f64 {
    2.0
}

impl Default for SceneParams {
    fn default() -> Self {
        Self {
            wavelength: 1.0,
            grid: [16, 16],
            resolution_fraction: 0.3,
            tx: ArcSpec {
                count: 4,
                start_deg: 0.0,
                end_deg: 120.0,
            },
            rx: ArcSpec {
                count: 16,
                start_deg: 0.0,
                end_deg: 75.0,
            },
            ring_radius_factor: default_ring_factor(),
            medium: MediumParams::default(),
        }
    }
}

impl SceneParams {
    /// Same scene with the random medium removed.
    pub fn free_space(&self) -> Self {
        let mut p = *self;
        p.medium.count = 0;
        p
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn fingerprint(&self) -> String {
        crate::fingerprint(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scatterer {
    pub position: Point2,
    pub strength: C64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomMedium {
    pub scatterers: Vec<Scatterer>,
    pub seed: u64,
    /// Inner and outer radius in meters.
    pub annulus: (f64, f64),
}

impl RandomMedium {
    pub fn empty() -> Self {
        Self {
            scatterers: Vec::new(),
            seed: 0,
            annulus: (0.0, 0.0),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.scatterers.is_empty()
    }

    pub fn len(&self) -> usize {
        self.scatterers.len()
    }
}

/// Region the medium must stay out of: an axis-aligned box plus points
/// (antennas) that scatterers keep the minimum spacing from.
#[derive(Clone, Debug, PartialEq)]
pub struct Exclusion {
    pub min: Point2,
    pub max: Point2,
    pub points: Vec<Point2>,
}

impl Exclusion {
    fn in_box(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

/// Places `count` scatterers uniformly over the annulus `(r_inner, r_outer)`
/// by rejection sampling, keeping every pair at least `min_spacing` apart and
/// every scatterer outside `exclusion`. Deterministic in `seed`.
pub fn build_medium(
    seed: u64,
    count: usize,
    annulus: (f64, f64),
    strength: C64,
    min_spacing: f64,
    exclusion: Option<&Exclusion>,
) -> Result<RandomMedium> {
    let (r_in, r_out) = annulus;
    if count == 0 {
        return Ok(RandomMedium {
            scatterers: Vec::new(),
            seed,
            annulus,
        });
    }
    if !(r_in >= 0.0 && r_in < r_out) {
        return Err(Error::Domain(format!(
            "annulus needs 0 <= r_inner < r_outer, got ({r_in}, {r_out})"
        )));
    }
    let mut rng = RngStream::new(seed, MEDIUM_STREAM);
    let max_attempts = 1000 * count + 10_000;
    let mut placed: Vec<Scatterer> = Vec::with_capacity(count);
    let mut attempts = 0;
    while placed.len() < count {
        if attempts >= max_attempts {
            return Err(Error::Placement {
                requested: count,
                placed: placed.len(),
                attempts,
            });
        }
        attempts += 1;
        let r = (rng.uniform() * (r_out * r_out - r_in * r_in) + r_in * r_in).sqrt();
        let theta = 2.0 * PI * rng.uniform();
        let p = Point2::polar(r, theta);
        if let Some(e) = exclusion {
            if e.in_box(p) || e.points.iter().any(|q| q.distance(p) < min_spacing) {
                continue;
            }
        }
        if placed.iter().any(|s| s.position.distance(p) < min_spacing) {
            continue;
        }
        placed.push(Scatterer {
            position: p,
            strength,
        });
    }
    Ok(RandomMedium {
        scatterers: placed,
        seed,
        annulus,
    })
}

/// Imaging geometry: a square-celled grid centered on the origin, antenna
/// rings around it and an optional random medium in between.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub params: SceneParams,
    pub wavelength: f64,
    pub wavenumber: f64,
    pub cell_size: f64,
    pub nx: usize,
    pub ny: usize,
    /// Lower-left corner of the grid.
    pub origin: Point2,
    pub transmitters: Vec<Point2>,
    pub receivers: Vec<Point2>,
    pub medium: RandomMedium,
}

impl Scene {
    pub fn build(params: &SceneParams) -> Result<Self> {
        let wavelength = params.wavelength;
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::Domain(format!("wavelength must be > 0, got {wavelength}")));
        }
        if !(params.resolution_fraction > 0.0) {
            return Err(Error::Domain("resolution fraction must be > 0".into()));
        }
        let [nx, ny] = params.grid;
        if nx == 0 || ny == 0 {
            return Err(Error::Domain("grid dimensions must be positive".into()));
        }
        let cell_size = params.resolution_fraction * wavelength;
        let (width, height) = (nx as f64 * cell_size, ny as f64 * cell_size);
        let origin = Point2::new(-width / 2.0, -height / 2.0);
        let side = width.max(height);
        let circumradius = 0.5 * width.hypot(height);
        let ring = params.ring_radius_factor * side;

        let place = |arc: &ArcSpec| -> Vec<Point2> {
            arc.angles_deg()
                .into_iter()
                .map(|deg| Point2::polar(ring, deg.to_radians()))
                .collect()
        };
        let transmitters = place(&params.tx);
        let receivers = place(&params.rx);
        if transmitters.is_empty() || receivers.is_empty() {
            return Err(Error::Domain("need at least one transmitter and one receiver".into()));
        }
        let exclusion = Exclusion {
            min: origin,
            max: Point2::new(-origin.x, -origin.y),
            points: transmitters.iter().chain(&receivers).copied().collect(),
        };
        if exclusion.points.iter().any(|&p| exclusion.in_box(p)) {
            return Err(Error::Domain("antennas must lie outside the investigation grid".into()));
        }

        let mp = &params.medium;
        let medium = build_medium(
            mp.seed,
            mp.count,
            (mp.annulus[0] * circumradius, mp.annulus[1] * circumradius),
            C64::new(mp.strength[0], mp.strength[1]),
            mp.min_spacing * wavelength,
            Some(&exclusion),
        )?;

        Ok(Self {
            params: *params,
            wavelength,
            wavenumber: 2.0 * PI / wavelength,
            cell_size,
            nx,
            ny,
            origin,
            transmitters,
            receivers,
            medium,
        })
    }

    pub fn num_cells(&self) -> usize {
        self.nx * self.ny
    }

    /// Center of cell `j`, cells enumerated row-major (`j = iy * nx + ix`).
    pub fn cell_center(&self, j: usize) -> Point2 {
        let (ix, iy) = (j % self.nx, j / self.nx);
        Point2::new(
            self.origin.x + (ix as f64 + 0.5) * self.cell_size,
            self.origin.y + (iy as f64 + 0.5) * self.cell_size,
        )
    }

    pub fn cell_centers(&self) -> Vec<Point2> {
        (0..self.num_cells()).map(|j| self.cell_center(j)).collect()
    }

    /// Half the grid diagonal.
    pub fn grid_circumradius(&self) -> f64 {
        0.5 * (self.nx as f64 * self.cell_size).hypot(self.ny as f64 * self.cell_size)
    }

    pub fn fingerprint(&self) -> String {
        self.params.fingerprint()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_geometry() {
        let scene = Scene::build(&SceneParams::default()).unwrap();
        assert_eq!(scene.num_cells(), 256);
        assert_eq!(scene.transmitters.len(), 4);
        assert_eq!(scene.receivers.len(), 16);
        assert!((scene.cell_size - 0.3).abs() < 1e-15);
        assert_eq!(scene.medium.len(), 64);
        let r = scene.grid_circumradius();
        for s in &scene.medium.scatterers {
            let d = s.position.norm();
            assert!(d >= 1.5 * r - 1e-12 && d <= 3.0 * r + 1e-12);
            for a in scene.transmitters.iter().chain(&scene.receivers) {
                assert!(a.distance(s.position) >= 0.05);
            }
        }
        // cells tile the grid symmetrically
        let first = scene.cell_center(0);
        let last = scene.cell_center(255);
        assert!((first.x + last.x).abs() < 1e-12 && (first.y + last.y).abs() < 1e-12);
    }

    #[test]
    fn empty_medium_when_count_is_zero() {
        let m = build_medium(3, 0, (1.0, 2.0), C64::new(0.0, 1.0), 0.05, None).unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn medium_is_deterministic_in_seed() {
        let a = build_medium(11, 30, (1.0, 2.0), C64::new(0.0, 1.0), 0.05, None).unwrap();
        let b = build_medium(11, 30, (1.0, 2.0), C64::new(0.0, 1.0), 0.05, None).unwrap();
        let c = build_medium(12, 30, (1.0, 2.0), C64::new(0.0, 1.0), 0.05, None).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn spacing_is_enforced() {
        let m = build_medium(5, 64, (4.0, 6.0), C64::new(0.0, 1.5), 0.05, None).unwrap();
        for (i, a) in m.scatterers.iter().enumerate() {
            for b in &m.scatterers[i + 1..] {
                assert!(a.position.distance(b.position) >= 0.05);
            }
        }
    }

    #[test]
    fn crowded_annulus_fails_placement() {
        let err = build_medium(1, 500, (1.0, 1.05), C64::new(0.0, 1.0), 0.2, None).unwrap_err();
        assert!(matches!(err, Error::Placement { .. }));
    }

    #[test]
    fn bad_annulus_is_rejected() {
        assert!(build_medium(1, 3, (2.0, 1.0), C64::new(0.0, 1.0), 0.05, None).is_err());
    }

    #[test]
    fn antennas_inside_grid_are_rejected() {
        let mut p = SceneParams::default();
        p.ring_radius_factor = 0.1;
        assert!(Scene::build(&p).is_err());
    }

    #[test]
    fn params_round_trip_through_json() {
        let p = SceneParams::default();
        let json = serde_json::to_string(&p).unwrap();
        let back: SceneParams = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);
        assert_eq!(p.fingerprint(), back.fingerprint());
        assert_ne!(p.fingerprint(), p.free_space().fingerprint());
    }
}
