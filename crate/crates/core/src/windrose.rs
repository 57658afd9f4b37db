//! 36-sector wind-direction statistics.
//!
//! Directions follow the meteorological convention: the bearing the wind
//! blows FROM, in degrees clockwise from true north. Each observation is
//! rounded to the nearest 10-degree sector; north maps to the 360 sector,
//! so the sector centers run 10, 20, ..., 360.

use crate::error::{Error, Result};

pub const SECTOR_COUNT: usize = 36;
pub const SECTOR_WIDTH_DEG: f64 = 10.0;

/// Default minimum share for reporting a secondary direction.
pub const DEFAULT_SECONDARY_THRESHOLD: f64 = 0.15;
/// A secondary peak must sit at least this many sectors from the primary.
pub const SECONDARY_MIN_SEPARATION: usize = 3;

const COMPASS_16: [&str; 16] = [
    "N", "NNE", "NE", "ENE", "E", "ESE", "SE", "SSE", "S", "SSW", "SW", "WSW", "W", "WNW", "NW",
    "NNW",
];

/// Relative frequency of the 36 direction sectors.
#[derive(Debug, Clone, PartialEq)]
pub struct WindRose {
    counts: [u64; SECTOR_COUNT],
    n_observations: u64,
    n_calm_or_invalid: u64,
}

/// Most frequent direction(s) of a rose.
#[derive(Debug, Clone)]
pub struct DominantDirections {
    /// Center of the most frequent sector, degrees.
    pub primary_sector_deg: f64,
    pub primary_share: f64,
    /// Present only when a well-separated second peak passes the threshold.
    pub secondary_sector_deg: Option<f64>,
    pub secondary_share: Option<f64>,
    /// 16-point compass name nearest the primary sector center.
    pub compass_label: &'static str,
}

/// Sector index (0-based, center = (i + 1) * 10 deg) for a direction, or
/// None when the entry is missing, non-finite, or out of range.
fn sector_index(direction: Option<f64>) -> Option<usize> {
    let d = direction?;
    if !d.is_finite() || !(0.0..=360.0).contains(&d) {
        return None;
    }
    // round half-up to the nearest sector; 0 wraps to the north sector 360
    let mut sector = (d / SECTOR_WIDTH_DEG).round() as usize;
    if sector == 0 {
        sector = SECTOR_COUNT;
    }
    Some(sector - 1)
}

/// Bin directions into the 36 sectors. `None` entries are calm or invalid
/// observations; they are counted but excluded from the frequencies.
pub fn bin_directions(directions: &[Option<f64>]) -> Result<WindRose> {
    let mut counts = [0u64; SECTOR_COUNT];
    let mut n_calm_or_invalid = 0u64;
    for &d in directions {
        match sector_index(d) {
            Some(i) => counts[i] += 1,
            None => n_calm_or_invalid += 1,
        }
    }
    let n_observations: u64 = counts.iter().sum();
    if n_observations == 0 {
        return Err(Error::InsufficientData(
            "no valid directions to bin".to_string(),
        ));
    }
    Ok(WindRose {
        counts,
        n_observations,
        n_calm_or_invalid,
    })
}

impl WindRose {
    pub fn n_observations(&self) -> u64 {
        self.n_observations
    }

    pub fn n_calm_or_invalid(&self) -> u64 {
        self.n_calm_or_invalid
    }

    pub fn sector_counts(&self) -> &[u64; SECTOR_COUNT] {
        &self.counts
    }

    /// Relative frequency per sector; sums to 1.
    pub fn sector_frequencies(&self) -> [f64; SECTOR_COUNT] {
        let n = self.n_observations as f64;
        let mut freqs = [0.0; SECTOR_COUNT];
        for (f, &c) in freqs.iter_mut().zip(self.counts.iter()) {
            *f = c as f64 / n;
        }
        freqs
    }

    /// Sector center angles 10, 20, ..., 360 degrees.
    pub fn sector_centers() -> [f64; SECTOR_COUNT] {
        let mut centers = [0.0; SECTOR_COUNT];
        for (i, c) in centers.iter_mut().enumerate() {
            *c = (i + 1) as f64 * SECTOR_WIDTH_DEG;
        }
        centers
    }

    /// Combine counts from a partition of the same input.
    pub fn merge(&self, other: &WindRose) -> WindRose {
        let mut counts = self.counts;
        for (c, o) in counts.iter_mut().zip(other.counts.iter()) {
            *c += o;
        }
        WindRose {
            counts,
            n_observations: self.n_observations + other.n_observations,
            n_calm_or_invalid: self.n_calm_or_invalid + other.n_calm_or_invalid,
        }
    }
}

/// 16-point compass name whose center is nearest to `angle_deg`.
pub fn compass_label(angle_deg: f64) -> &'static str {
    let idx = (angle_deg / 22.5).round() as usize % 16;
    COMPASS_16[idx]
}

/// Identify the primary (and optionally secondary) wind direction.
///
/// Ties break toward the smaller angle. A secondary direction is reported
/// only for a local-maximum sector holding at least `secondary_threshold`
/// of the observations at least three sectors away from the primary.
pub fn dominant_directions(rose: &WindRose, secondary_threshold: f64) -> DominantDirections {
    let freqs = rose.sector_frequencies();
    let centers = WindRose::sector_centers();
    let mut primary = 0;
    for (i, &f) in freqs.iter().enumerate() {
        if f > freqs[primary] {
            primary = i;
        }
    }

    let circular_distance = |a: usize, b: usize| -> usize {
        let d = a.abs_diff(b);
        d.min(SECTOR_COUNT - d)
    };
    let mut secondary: Option<usize> = None;
    for i in 0..SECTOR_COUNT {
        if i == primary || circular_distance(i, primary) < SECONDARY_MIN_SEPARATION {
            continue;
        }
        let prev = freqs[(i + SECTOR_COUNT - 1) % SECTOR_COUNT];
        let next = freqs[(i + 1) % SECTOR_COUNT];
        let is_local_max = freqs[i] >= prev && freqs[i] >= next;
        if is_local_max && freqs[i] >= secondary_threshold {
            match secondary {
                Some(s) if freqs[i] <= freqs[s] => {}
                _ => secondary = Some(i),
            }
        }
    }

    DominantDirections {
        primary_sector_deg: centers[primary],
        primary_share: freqs[primary],
        secondary_sector_deg: secondary.map(|i| centers[i]),
        secondary_share: secondary.map(|i| freqs[i]),
        compass_label: compass_label(centers[primary]),
    }
}

/// Polar series behind a rose plot: 36 (angle deg, relative frequency)
/// pairs in ascending angle.
pub fn rose_plot_data(rose: &WindRose) -> Vec<(f64, f64)> {
    WindRose::sector_centers()
        .iter()
        .copied()
        .zip(rose.sector_frequencies())
        .collect()
}

/// CSV rendering of the plot data (`angle_deg,frequency`).
pub fn rose_csv(rose: &WindRose) -> String {
    let mut out = String::from("angle_deg,frequency\n");
    for (angle, freq) in rose_plot_data(rose) {
        out.push_str(&format!("{},{}\n", angle, crate::report::fmt_sig(freq, 6)));
    }
    out
}

/// Standalone SVG polar chart of the rose. North is up, angles run
/// clockwise; each sector is a wedge with radius proportional to its
/// relative frequency.
pub fn rose_svg(rose: &WindRose) -> String {
    const SIZE: f64 = 420.0;
    const CENTER: f64 = SIZE / 2.0;
    const RADIUS: f64 = 170.0;
    let freqs = rose.sector_frequencies();
    let max_freq = freqs.iter().cloned().fold(0.0_f64, f64::max).max(1e-12);

    let polar = |angle_deg: f64, r: f64| -> (f64, f64) {
        let rad = angle_deg.to_radians();
        (CENTER + r * rad.sin(), CENTER - r * rad.cos())
    };

    let mut svg = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#,
        size = SIZE
    );
    svg.push('\n');
    for frac in [0.25, 0.5, 0.75, 1.0] {
        svg.push_str(&format!(
            r##"<circle cx="{CENTER}" cy="{CENTER}" r="{:.1}" fill="none" stroke="#cccccc" stroke-width="1"/>"##,
            RADIUS * frac
        ));
        svg.push('\n');
    }
    for (label, angle) in [("N", 0.0), ("E", 90.0), ("S", 180.0), ("W", 270.0)] {
        let (x, y) = polar(angle, RADIUS + 14.0);
        svg.push_str(&format!(
            r#"<text x="{x:.1}" y="{y:.1}" text-anchor="middle" dominant-baseline="middle" font-family="sans-serif" font-size="13">{label}</text>"#
        ));
        svg.push('\n');
    }
    for (i, &f) in freqs.iter().enumerate() {
        if f == 0.0 {
            continue;
        }
        let center_angle = (i + 1) as f64 * SECTOR_WIDTH_DEG;
        let r = RADIUS * f / max_freq;
        let (x1, y1) = polar(center_angle - 5.0, r);
        let (x2, y2) = polar(center_angle + 5.0, r);
        svg.push_str(&format!(
            r##"<path d="M{CENTER} {CENTER} L{x1:.2} {y1:.2} A{r:.2} {r:.2} 0 0 1 {x2:.2} {y2:.2} Z" fill="#4878a8" fill-opacity="0.8" stroke="#274060" stroke-width="0.5"/>"##
        ));
        svg.push('\n');
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_input_gives_flat_rose() {
        let mut dirs = Vec::new();
        for sector in 1..=36 {
            for _ in 0..1000 {
                dirs.push(Some(sector as f64 * 10.0));
            }
        }
        let rose = bin_directions(&dirs).unwrap();
        for f in rose.sector_frequencies() {
            assert_eq!(f, 1000.0 / 36_000.0);
        }
        assert_eq!(rose.n_observations(), 36_000);
        assert_eq!(rose.n_calm_or_invalid(), 0);
    }

    #[test]
    fn single_direction_concentrates_one_sector() {
        let dirs = vec![Some(157.0); 40];
        let rose = bin_directions(&dirs).unwrap();
        let freqs = rose.sector_frequencies();
        assert_eq!(freqs[15], 1.0); // 160-degree sector
        assert_eq!(freqs.iter().filter(|f| **f > 0.0).count(), 1);
    }

    #[test]
    fn north_wrap() {
        // 0, 360, and 359 all belong to the north (360) sector
        let rose = bin_directions(&[Some(0.0), Some(360.0), Some(359.0)]).unwrap();
        assert_eq!(rose.sector_frequencies()[35], 1.0);
    }

    #[test]
    fn boundary_rounds_half_up() {
        // 15 degrees sits on the 10/20 boundary and goes to 20
        let rose = bin_directions(&[Some(15.0)]).unwrap();
        assert_eq!(rose.sector_frequencies()[1], 1.0);
        // 14.999 goes down to 10
        let rose = bin_directions(&[Some(14.999)]).unwrap();
        assert_eq!(rose.sector_frequencies()[0], 1.0);
    }

    #[test]
    fn invalid_entries_counted_not_binned() {
        let dirs = vec![Some(90.0), None, Some(-5.0), Some(361.0), Some(f64::NAN)];
        let rose = bin_directions(&dirs).unwrap();
        assert_eq!(rose.n_observations(), 1);
        assert_eq!(rose.n_calm_or_invalid(), 4);
        assert_eq!(rose.n_observations() + rose.n_calm_or_invalid(), 5);
    }

    #[test]
    fn empty_effective_input_errors() {
        assert!(bin_directions(&[]).is_err());
        assert!(bin_directions(&[None, None]).is_err());
    }

    #[test]
    fn frequencies_sum_to_one() {
        let dirs: Vec<Option<f64>> = (0..999).map(|i| Some((i % 360) as f64)).collect();
        let rose = bin_directions(&dirs).unwrap();
        let sum: f64 = rose.sector_frequencies().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_shifts_sectors_cyclically() {
        let dirs: Vec<Option<f64>> = (0..5000)
            .map(|i| Some(((i * 37) % 3600) as f64 / 10.0))
            .collect();
        let base = bin_directions(&dirs).unwrap();
        for shift in [1usize, 4, 17, 36] {
            let rotated: Vec<Option<f64>> = dirs
                .iter()
                .map(|d| {
                    d.map(|d| {
                        let r = (d + 10.0 * shift as f64) % 360.0;
                        if r == 0.0 {
                            360.0
                        } else {
                            r
                        }
                    })
                })
                .collect();
            let rot = bin_directions(&rotated).unwrap();
            let a = base.sector_frequencies();
            let b = rot.sector_frequencies();
            for i in 0..SECTOR_COUNT {
                assert_eq!(
                    a[i],
                    b[(i + shift) % SECTOR_COUNT],
                    "shift {shift}, sector {i}"
                );
            }
        }
    }

    #[test]
    fn order_does_not_matter() {
        let dirs: Vec<Option<f64>> = (0..500).map(|i| Some(((i * 97) % 361) as f64)).collect();
        let mut reversed = dirs.clone();
        reversed.reverse();
        assert_eq!(
            bin_directions(&dirs).unwrap(),
            bin_directions(&reversed).unwrap()
        );
    }

    #[test]
    fn merge_sums_partition_counts() {
        let dirs: Vec<Option<f64>> = (0..1000)
            .map(|i| {
                if i % 10 == 0 {
                    None
                } else {
                    Some((i % 360) as f64)
                }
            })
            .collect();
        let whole = bin_directions(&dirs).unwrap();
        let left = bin_directions(&dirs[..400]).unwrap();
        let right = bin_directions(&dirs[400..]).unwrap();
        assert_eq!(left.merge(&right), whole);
    }

    #[test]
    fn compass_labels_for_all_sector_centers() {
        let expected = [
            (10.0, "N"),
            (20.0, "NNE"),
            (30.0, "NNE"),
            (40.0, "NE"),
            (50.0, "NE"),
            (60.0, "ENE"),
            (70.0, "ENE"),
            (80.0, "E"),
            (90.0, "E"),
            (100.0, "E"),
            (110.0, "ESE"),
            (120.0, "ESE"),
            (130.0, "SE"),
            (140.0, "SE"),
            (150.0, "SSE"),
            (160.0, "SSE"),
            (170.0, "S"),
            (180.0, "S"),
            (190.0, "S"),
            (200.0, "SSW"),
            (210.0, "SSW"),
            (220.0, "SW"),
            (230.0, "SW"),
            (240.0, "WSW"),
            (250.0, "WSW"),
            (260.0, "W"),
            (270.0, "W"),
            (280.0, "W"),
            (290.0, "WNW"),
            (300.0, "WNW"),
            (310.0, "NW"),
            (320.0, "NW"),
            (330.0, "NNW"),
            (340.0, "NNW"),
            (350.0, "N"),
            (360.0, "N"),
        ];
        for (angle, label) in expected {
            assert_eq!(compass_label(angle), label, "angle {angle}");
        }
    }

    #[test]
    fn dominant_direction_sse_and_ssw() {
        let rose = bin_directions(&vec![Some(160.0); 100]).unwrap();
        let d = dominant_directions(&rose, DEFAULT_SECONDARY_THRESHOLD);
        assert_eq!(d.primary_sector_deg, 160.0);
        assert_eq!(d.compass_label, "SSE");
        assert_eq!(d.primary_share, 1.0);
        assert!(d.secondary_sector_deg.is_none());

        let mut dirs = vec![Some(200.0); 60];
        dirs.extend(vec![Some(210.0); 40]);
        let rose = bin_directions(&dirs).unwrap();
        let d = dominant_directions(&rose, DEFAULT_SECONDARY_THRESHOLD);
        assert_eq!(d.primary_sector_deg, 200.0);
        assert_eq!(d.compass_label, "SSW");
    }

    #[test]
    fn uniform_rose_breaks_ties_toward_small_angles() {
        let dirs: Vec<Option<f64>> = (1..=36).map(|s| Some(s as f64 * 10.0)).collect();
        let rose = bin_directions(&dirs).unwrap();
        let d = dominant_directions(&rose, DEFAULT_SECONDARY_THRESHOLD);
        assert_eq!(d.primary_sector_deg, 10.0);
        assert!(d.secondary_sector_deg.is_none());
    }

    #[test]
    fn secondary_direction_needs_share_and_separation() {
        // two peaks: 70% at 160 deg, 30% at 340 deg
        let mut dirs = vec![Some(160.0); 700];
        dirs.extend(vec![Some(340.0); 300]);
        let rose = bin_directions(&dirs).unwrap();
        let d = dominant_directions(&rose, 0.15);
        assert_eq!(d.primary_sector_deg, 160.0);
        assert_eq!(d.secondary_sector_deg, Some(340.0));
        assert!((d.secondary_share.unwrap() - 0.3).abs() < 1e-12);
        // raising the threshold above the peak hides it
        let d = dominant_directions(&rose, 0.35);
        assert!(d.secondary_sector_deg.is_none());
        // an adjacent spill-over peak is not a second direction
        let mut dirs = vec![Some(160.0); 700];
        dirs.extend(vec![Some(170.0); 300]);
        let rose = bin_directions(&dirs).unwrap();
        let d = dominant_directions(&rose, 0.15);
        assert!(d.secondary_sector_deg.is_none());
    }

    #[test]
    fn plot_data_mirrors_frequencies() {
        let dirs = vec![Some(160.0), Some(160.0), Some(20.0), Some(275.0)];
        let rose = bin_directions(&dirs).unwrap();
        let data = rose_plot_data(&rose);
        assert_eq!(data.len(), 36);
        assert_eq!(data[0].0, 10.0);
        assert_eq!(data[35].0, 360.0);
        let total: f64 = data.iter().map(|(_, r)| r).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let freqs = rose.sector_frequencies();
        for (i, (_, r)) in data.iter().enumerate() {
            assert_eq!(*r, freqs[i]);
        }
    }

    #[test]
    fn csv_and_svg_render() {
        let rose = bin_directions(&[Some(160.0), Some(20.0)]).unwrap();
        let csv = rose_csv(&rose);
        assert!(csv.starts_with("angle_deg,frequency\n"));
        assert_eq!(csv.lines().count(), 37);
        let svg = rose_svg(&rose);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("</svg>"));
    }
}
