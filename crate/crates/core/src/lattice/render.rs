//! Rasters, palettes and PGM/PNG/CSV export of lattice patterns.

use std::io::Write;

use thiserror::Error;

use super::grid::DenseGrid;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("cannot render a {width}x{height} image")]
    ZeroArea { width: usize, height: usize },
    #[error("palette needs at least one color")]
    EmptyPalette,
    #[error("PNG encoding failed: {0}")]
    Png(#[from] png::EncodingError),
    #[error("CSV output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Rectangular block of cell values; row 0 is the top (largest `j`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub values: Vec<u64>,
}

impl Raster {
    pub fn new(width: usize, height: usize, values: Vec<u64>) -> Self {
        assert_eq!(values.len(), width * height, "raster size");
        Raster { width, height, values }
    }

    /// The tight box around the nonzero cells grown by `margin` on each side.
    /// An empty grid gives the single origin cell.
    pub fn crop(grid: &DenseGrid, margin: i64) -> Self {
        let (i0, i1, j0, j1) = grid.nonzero_bounds().unwrap_or((0, 0, 0, 0));
        let (i0, i1, j0, j1) = (i0 - margin, i1 + margin, j0 - margin, j1 + margin);
        let width = (i1 - i0 + 1) as usize;
        let height = (j1 - j0 + 1) as usize;
        let mut values = Vec::with_capacity(width * height);
        for j in (j0..=j1).rev() {
            for i in i0..=i1 {
                values.push(grid.get((i, j)));
            }
        }
        Raster { width, height, values }
    }

    fn check(&self) -> Result<(), RenderError> {
        if self.width == 0 || self.height == 0 {
            return Err(RenderError::ZeroArea { width: self.width, height: self.height });
        }
        Ok(())
    }
}

/// Value-indexed colors; values past the end use the last entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    pub rgb: Vec<[u8; 3]>,
    pub gray: Vec<u8>,
}

impl Default for Palette {
    /// Eight classes, 0 black, brightness increasing with the value.
    fn default() -> Self {
        Palette {
            rgb: vec![
                [0, 0, 0],
                [35, 55, 160],
                [40, 150, 140],
                [235, 190, 50],
                [220, 90, 40],
                [200, 60, 160],
                [150, 220, 230],
                [255, 255, 255],
            ],
            gray: vec![0, 40, 80, 120, 160, 200, 230, 255],
        }
    }
}

impl Palette {
    fn class(&self, value: u64) -> usize {
        (value as usize).min(self.gray.len() - 1)
    }

    pub fn gray_of(&self, value: u64) -> u8 {
        self.gray[self.class(value)]
    }

    pub fn rgb_of(&self, value: u64) -> [u8; 3] {
        self.rgb[self.class(value).min(self.rgb.len() - 1)]
    }

    fn check(&self) -> Result<(), RenderError> {
        if self.gray.is_empty() || self.rgb.is_empty() {
            return Err(RenderError::EmptyPalette);
        }
        Ok(())
    }
}

/// Plain (P2) PGM with maxval 255, one text line per image row.
pub fn encode_pgm(raster: &Raster, palette: &Palette) -> Result<Vec<u8>, RenderError> {
    raster.check()?;
    palette.check()?;
    let mut out = format!("P2\n{} {}\n255\n", raster.width, raster.height).into_bytes();
    for row in raster.values.chunks_exact(raster.width) {
        let line: Vec<String> = row.iter().map(|&v| palette.gray_of(v).to_string()).collect();
        out.extend_from_slice(line.join(" ").as_bytes());
        out.push(b'\n');
    }
    Ok(out)
}

/// 8-bit RGB PNG.
pub fn encode_png(raster: &Raster, palette: &Palette) -> Result<Vec<u8>, RenderError> {
    raster.check()?;
    palette.check()?;
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, raster.width as u32, raster.height as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header()?;
        let data: Vec<u8> = raster.values.iter().flat_map(|&v| palette.rgb_of(v)).collect();
        writer.write_image_data(&data)?;
    }
    Ok(out)
}

/// `i,j,value` for every nonzero cell, top row first, left to right.
pub fn write_grid_csv<W: Write>(grid: &DenseGrid, out: W) -> Result<(), RenderError> {
    let mut rows: Vec<_> = grid.nonzero().collect();
    rows.sort_by_key(|&((i, j), _)| (std::cmp::Reverse(j), i));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["i", "j", "value"])?;
    for ((i, j), v) in rows {
        w.serialize((i, j, v))?;
    }
    w.flush()?;
    Ok(())
}
