//! Seeded random flippers, biflippers and isometries for tests and sweeps.

use rand::Rng;
use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

use crate::biflipper::Biflipper;
use crate::flips::{Flipper, FlipperKind, Isometry};
use crate::numkernel::{affine_matrix, boost_to, rotation2, rotation3, IsometryMatrix, Mat, SpaceTag, Vector};
use crate::quaternion::Quaternion;
use crate::wordreduce::ReflectionWord;

/// Half-width of the box Euclidean coordinates are drawn from.
pub const BOX: f64 = 10.0;

/// Largest hyperbolic distance from the origin used for sampled points.
pub const RADIUS: f64 = 2.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn coords<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-BOX..BOX)).collect()
}

/// Uniform unit vector of `R^n`.
pub fn unit<R: Rng>(rng: &mut R, n: usize) -> Vector {
    loop {
        let v = Vector::from_iterator(n, (0..n).map(|_| rng.gen_range(-1.0..1.0)));
        let len = v.norm();
        if len > 1e-3 && len <= 1.0 {
            return v / len;
        }
    }
}

/// Point of the hyperboloid `<x, x> = 1` of `R^{1,n}` within `RADIUS` of the origin.
pub fn hyperboloid_point<R: Rng>(rng: &mut R, n: usize) -> Vector {
    let r = rng.gen_range(0.0..RADIUS);
    let u = unit(rng, n);
    let mut x = Vector::zeros(n + 1);
    x[0] = r.cosh();
    x.rows_mut(1, n).copy_from(&(u * r.sinh()));
    x
}

/// Spacelike unit normal of a hyperplane passing within `RADIUS` of the origin.
pub fn spacelike_normal<R: Rng>(rng: &mut R, n: usize) -> Vector {
    let r = rng.gen_range(0.0..RADIUS);
    let u = unit(rng, n);
    let mut x = Vector::zeros(n + 1);
    x[0] = r.sinh();
    x.rows_mut(1, n).copy_from(&(u * r.cosh()));
    x
}

/// Proper flipper kinds available in a space.
pub fn kinds(space: SpaceTag) -> &'static [FlipperKind] {
    use FlipperKind::*;
    match space {
        SpaceTag::E1 | SpaceTag::RP2 => &[Point],
        SpaceTag::E2 | SpaceTag::H2 => &[Point, Line],
        SpaceTag::E3 | SpaceTag::H3 => &[Point, Line, Plane],
        SpaceTag::S2 | SpaceTag::Moeb => &[PointPair, Circle],
    }
}

pub fn flipper_of_kind<R: Rng>(rng: &mut R, space: SpaceTag, kind: FlipperKind) -> Flipper {
    use FlipperKind::*;
    use SpaceTag::*;
    let f = match (space, kind) {
        (_, Whole) => Ok(Flipper::whole(space)),
        (E1 | E2 | E3, Point) => Flipper::e_point(&coords(rng, space.euclidean_dim().unwrap())),
        (E2, Line) => {
            let d = unit(rng, 2);
            Flipper::e_line(&coords(rng, 2), d.as_slice())
        }
        (E3, Line) => {
            let d = unit(rng, 3);
            Flipper::e_line(&coords(rng, 3), d.as_slice())
        }
        (E3, Plane) => {
            let n = unit(rng, 3);
            Flipper::e_plane(&coords(rng, 3), n.as_slice())
        }
        (S2, PointPair) | (RP2, Point) => Flipper::span(space, &[unit(rng, 3)]),
        (S2, Circle) => Flipper::with_normal(space, &unit(rng, 3)),
        (H2, Point) => Flipper::span(space, &[hyperboloid_point(rng, 2)]),
        (H2, Line) => Flipper::with_normal(space, &spacelike_normal(rng, 2)),
        (H3, Point) => Flipper::span(space, &[hyperboloid_point(rng, 3)]),
        (H3 | Moeb, Line | PointPair) => {
            let (a, b) = (hyperboloid_point(rng, 3), hyperboloid_point(rng, 3));
            Flipper::span(space, &[a, b])
        }
        (H3 | Moeb, Plane | Circle) => Flipper::with_normal(space, &spacelike_normal(rng, 3)),
        _ => panic!("no {kind} flippers in {space}"),
    };
    f.expect("sampled flipper is valid")
}

/// Proper flipper of a random kind.
pub fn flipper<R: Rng>(rng: &mut R, space: SpaceTag) -> Flipper {
    let ks = kinds(space);
    let k = ks[rng.gen_range(0..ks.len())];
    flipper_of_kind(rng, space, k)
}

pub fn biflipper<R: Rng>(rng: &mut R, space: SpaceTag) -> Biflipper {
    Biflipper::new(flipper(rng, space), flipper(rng, space)).expect("same space")
}

/// Random isometry: a random motion composed with a reflection half of the
/// time. Spaces whose model is projective (`RP2`) get only motions.
pub fn isometry<R: Rng>(rng: &mut R, space: SpaceTag) -> Isometry {
    use SpaceTag::*;
    let flip = space != RP2 && rng.gen_bool(0.5);
    let m = match space {
        E1 => {
            let s = if flip { -1.0 } else { 1.0 };
            affine_matrix(&Mat::from_element(1, 1, s), &Vector::from_vec(coords(rng, 1)))
        }
        E2 => {
            let mut r = rotation2(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
            if flip {
                r.column_mut(1).neg_mut();
            }
            affine_matrix(&r, &Vector::from_vec(coords(rng, 2)))
        }
        E3 | S2 | RP2 => {
            let mut r = rotation3(&unit(rng, 3), rng.gen_range(0.0..std::f64::consts::PI));
            if flip {
                r = -r;
            }
            if space == E3 {
                affine_matrix(&r, &Vector::from_vec(coords(rng, 3)))
            } else {
                r
            }
        }
        H2 | H3 | Moeb => {
            let n = space.form().dim() - 1;
            let mut k = Mat::identity(n + 1, n + 1);
            let r = if n == 2 {
                rotation2(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
            } else {
                rotation3(&unit(rng, 3), rng.gen_range(0.0..std::f64::consts::PI))
            };
            k.view_mut((1, 1), (n, n)).copy_from(&r);
            if flip {
                k.row_mut(n).neg_mut();
            }
            boost_to(&hyperboloid_point(rng, n)) * k
        }
    };
    IsometryMatrix::new(space, m).expect("sampled isometry is valid")
}

/// Line of `E2` through a point of the box.
pub fn e2_line<R: Rng>(rng: &mut R) -> Flipper {
    let d = unit(rng, 2);
    Flipper::e_line(&coords(rng, 2), d.as_slice()).expect("unit direction")
}

/// Word of between 0 and `max_len` random lines.
pub fn word<R: Rng>(rng: &mut R, max_len: usize) -> ReflectionWord {
    let n = rng.gen_range(0..=max_len);
    ReflectionWord::new((0..n).map(|_| e2_line(rng)).collect()).expect("line letters")
}

pub fn unit_quaternion<R: Rng>(rng: &mut R) -> Quaternion {
    let v = unit(rng, 4);
    Quaternion::new(v[0], v[1], v[2], v[3])
}
