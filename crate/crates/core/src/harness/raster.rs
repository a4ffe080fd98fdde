//! Binary PPM rendering of firing rasters.

use std::path::Path;

use crate::snn::FiringMap;
use crate::Result;

pub const BACKGROUND: [u8; 3] = [255, 255, 255];
pub const SPIKE_COLOR: [u8; 3] = [0, 0, 255];

/// P6 image of width `duration` and height `n_neurons`; pixel `(t, n)` is
/// colored when neuron `n` fires at millisecond `t`.
pub fn raster_ppm(map: &FiringMap) -> Vec<u8> {
    let (w, h) = (map.duration() as usize, map.n_neurons());
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    let header = out.len();
    out.resize(header + 3 * w * h, 255);
    for s in map.spikes() {
        let at = header + 3 * (s.neuron as usize * w + s.t as usize);
        out[at..at + 3].copy_from_slice(&SPIKE_COLOR);
    }
    out
}

pub fn render_raster(map: &FiringMap, path: &Path) -> Result<()> {
    std::fs::write(path, raster_ppm(map))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snn::Spike;

    #[test]
    fn empty_map_is_white() {
        let img = raster_ppm(&FiringMap::empty(250, 250));
        assert!(img.starts_with(b"P6\n250 250\n255\n"));
        assert!(img[15..].iter().all(|&b| b == 255));
        assert_eq!(img.len(), 15 + 3 * 250 * 250);
    }

    #[test]
    fn single_pixel() {
        let map = FiringMap::from_spikes(250, 250, vec![Spike { t: 20, neuron: 10 }]).unwrap();
        let img = raster_ppm(&map);
        let body = &img[15..];
        let colored: Vec<usize> = (0..250 * 250).filter(|p| body[3 * p..3 * p + 3] != BACKGROUND).collect();
        assert_eq!(colored, vec![10 * 250 + 20]);
        assert_eq!(&body[3 * colored[0]..3 * colored[0] + 3], &SPIKE_COLOR);
    }
}
