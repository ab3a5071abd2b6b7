//! Heightfields and texture images.
//!
//! Both are row-major grids with row 0 at the top of the image. A uv
//! coordinate maps `u` to columns and `v` to rows, and pixel `(i, j)` has its
//! center at `((i + 0.5) / width, (j + 0.5) / height)`.

use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, ImageBuffer, ImageFormat, Luma, Rgb};

#[derive(Debug, thiserror::Error)]
pub enum ImageError {
    #[error("image has zero width or height")]
    ZeroSize,
    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("value {value} at index {index} is outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
    #[error("unsupported bit depth {0}")]
    UnsupportedDepth(u8),
    #[error("cannot decode image: {0}")]
    Decode(#[from] image::ImageError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Bits per sample of the stored representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn bits(self) -> u8 {
        match self {
            BitDepth::Eight => 8,
            BitDepth::Sixteen => 16,
        }
    }

    pub fn max_value(self) -> f64 {
        match self {
            BitDepth::Eight => 255.0,
            BitDepth::Sixteen => 65535.0,
        }
    }

    pub fn from_bits(bits: u8) -> Result<Self, ImageError> {
        match bits {
            8 => Ok(BitDepth::Eight),
            16 => Ok(BitDepth::Sixteen),
            other => Err(ImageError::UnsupportedDepth(other)),
        }
    }
}

/// Quantizes a normalized value, rounding halves up.
pub fn quantize(value: f64, depth: BitDepth) -> u16 {
    (value.clamp(0.0, 1.0) * depth.max_value() + 0.5).floor() as u16
}

#[derive(Debug, Clone, PartialEq)]
pub struct Heightfield {
    width: usize,
    height: usize,
    values: Vec<f64>,
    source_depth: BitDepth,
}

impl Heightfield {
    pub fn new(
        width: usize,
        height: usize,
        values: Vec<f64>,
        source_depth: BitDepth,
    ) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::ZeroSize);
        }
        if values.len() != width * height {
            return Err(ImageError::LengthMismatch {
                expected: width * height,
                found: values.len(),
            });
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(ImageError::OutOfRange { index, value });
        }
        Ok(Heightfield {
            width,
            height,
            values,
            source_depth,
        })
    }

    /// Builds a 16-bit-sourced field from a function of pixel coordinates.
    /// Results are clamped to `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "heightfield dimensions must be positive");
        let values = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| {
                let v = f(x, y);
                if v.is_nan() {
                    0.0
                } else {
                    v.clamp(0.0, 1.0)
                }
            })
            .collect();
        Heightfield {
            width,
            height,
            values,
            source_depth: BitDepth::Sixteen,
        }
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Self {
        Self::from_fn(width, height, |_, _| value)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source_depth(&self) -> BitDepth {
        self.source_depth
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Rotates counterclockwise by `quarter_turns` x 90 degrees.
    pub fn rotate90(&self, quarter_turns: u32) -> Heightfield {
        let (width, height, values) =
            rotate_grid(self.width, self.height, &self.values, quarter_turns);
        Heightfield {
            width,
            height,
            values,
            source_depth: self.source_depth,
        }
    }

    /// Bilinear sample with clamped uvs and clamp-to-edge borders.
    pub fn sample_bilinear(&self, u: f64, v: f64) -> f64 {
        let (x0, x1, fx) = axis_weights(u, self.width);
        let (y0, y1, fy) = axis_weights(v, self.height);
        let top = lerp(self.get(x0, y0), self.get(x1, y0), fx);
        let bottom = lerp(self.get(x0, y1), self.get(x1, y1), fx);
        lerp(top, bottom, fy)
    }

    /// Bilinear resampling to new dimensions (pixel-center aligned).
    pub fn resample(&self, width: usize, height: usize) -> Heightfield {
        if (width, height) == self.dims() {
            return self.clone();
        }
        let mut out = Heightfield::from_fn(width, height, |x, y| {
            self.sample_bilinear((x as f64 + 0.5) / width as f64, (y as f64 + 0.5) / height as f64)
        });
        out.source_depth = self.source_depth;
        out
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Raw samples at the given depth, row-major.
    pub fn quantized(&self, depth: BitDepth) -> Vec<u16> {
        self.values.iter().map(|&v| quantize(v, depth)).collect()
    }

    pub fn to_png_bytes(&self, depth: BitDepth) -> Result<Vec<u8>, ImageError> {
        let image = self.to_image(depth);
        let mut bytes = Vec::new();
        image.write_to(&mut Cursor::new(&mut bytes), ImageFormat::Png)?;
        Ok(bytes)
    }

    pub fn from_png_bytes(bytes: &[u8]) -> Result<Heightfield, ImageError> {
        let image = image::load_from_memory_with_format(bytes, ImageFormat::Png)?;
        Self::from_image(image)
    }

    fn to_image(&self, depth: BitDepth) -> DynamicImage {
        let (w, h) = (self.width as u32, self.height as u32);
        let raw = self.quantized(depth);
        match depth {
            BitDepth::Eight => {
                let data: Vec<u8> = raw.into_iter().map(|v| v as u8).collect();
                DynamicImage::ImageLuma8(ImageBuffer::<Luma<u8>, _>::from_raw(w, h, data).unwrap())
            }
            BitDepth::Sixteen => {
                DynamicImage::ImageLuma16(ImageBuffer::<Luma<u16>, _>::from_raw(w, h, raw).unwrap())
            }
        }
    }

    fn from_image(image: DynamicImage) -> Result<Heightfield, ImageError> {
        let (w, h) = (image.width() as usize, image.height() as usize);
        if w == 0 || h == 0 {
            return Err(ImageError::ZeroSize);
        }
        let (values, depth) = match image {
            DynamicImage::ImageLuma8(buf) => (
                buf.into_raw().into_iter().map(|p| p as f64 / 255.0).collect(),
                BitDepth::Eight,
            ),
            DynamicImage::ImageLumaA8(_) => (
                image.to_luma8().into_raw().into_iter().map(|p| p as f64 / 255.0).collect(),
                BitDepth::Eight,
            ),
            DynamicImage::ImageLuma16(buf) => (
                buf.into_raw().into_iter().map(|p| p as f64 / 65535.0).collect(),
                BitDepth::Sixteen,
            ),
            DynamicImage::ImageLumaA16(_) => (
                image.to_luma16().into_raw().into_iter().map(|p| p as f64 / 65535.0).collect(),
                BitDepth::Sixteen,
            ),
            DynamicImage::ImageRgb16(_) | DynamicImage::ImageRgba16(_) => {
                let rgb = image.to_rgb16();
                (
                    rgb.pixels()
                        .map(|p| luma709([p[0], p[1], p[2]].map(|c| c as f64 / 65535.0)))
                        .collect(),
                    BitDepth::Sixteen,
                )
            }
            other => {
                let rgb = other.to_rgb8();
                (
                    rgb.pixels()
                        .map(|p| luma709([p[0], p[1], p[2]].map(|c| c as f64 / 255.0)))
                        .collect(),
                    BitDepth::Eight,
                )
            }
        };
        Heightfield::new(w, h, values, depth)
    }
}

pub fn load_heightfield(path: impl AsRef<Path>) -> Result<Heightfield, ImageError> {
    let bytes = std::fs::read(path)?;
    Heightfield::from_png_bytes(&bytes)
}

pub fn save_heightfield(
    h: &Heightfield,
    path: impl AsRef<Path>,
    depth: BitDepth,
) -> Result<(), ImageError> {
    std::fs::write(path, h.to_png_bytes(depth)?)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TextureImage {
    width: usize,
    height: usize,
    rgb: Vec<[f64; 3]>,
}

impl TextureImage {
    pub fn new(width: usize, height: usize, rgb: Vec<[f64; 3]>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::ZeroSize);
        }
        if rgb.len() != width * height {
            return Err(ImageError::LengthMismatch {
                expected: width * height,
                found: rgb.len(),
            });
        }
        for (index, px) in rgb.iter().enumerate() {
            if let Some(&value) = px.iter().find(|c| !(0.0..=1.0).contains(*c)) {
                return Err(ImageError::OutOfRange { index, value });
            }
        }
        Ok(TextureImage { width, height, rgb })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> [f64; 3]) -> Self {
        assert!(width > 0 && height > 0, "texture dimensions must be positive");
        let rgb = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y).map(|c| if c.is_nan() { 0.0 } else { c.clamp(0.0, 1.0) }))
            .collect();
        TextureImage { width, height, rgb }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.rgb
    }

    pub fn get(&self, x: usize, y: usize) -> [f64; 3] {
        self.rgb[y * self.width + x]
    }

    pub fn rotate90(&self, quarter_turns: u32) -> TextureImage {
        let (width, height, rgb) = rotate_grid(self.width, self.height, &self.rgb, quarter_turns);
        TextureImage { width, height, rgb }
    }

    pub fn sample_bilinear(&self, u: f64, v: f64) -> [f64; 3] {
        let (x0, x1, fx) = axis_weights(u, self.width);
        let (y0, y1, fy) = axis_weights(v, self.height);
        let mut out = [0.0; 3];
        for (c, o) in out.iter_mut().enumerate() {
            let top = lerp(self.get(x0, y0)[c], self.get(x1, y0)[c], fx);
            let bottom = lerp(self.get(x0, y1)[c], self.get(x1, y1)[c], fx);
            *o = lerp(top, bottom, fy);
        }
        out
    }

    /// Grayscale by Rec.709 luma weights.
    pub fn luminance(&self) -> Heightfield {
        Heightfield::from_fn(self.width, self.height, |x, y| luma709(self.get(x, y)))
    }

    pub fn to_png_bytes(&self) -> Result<Vec<u8>, ImageError> {
        let data: Vec<u8> = self
            .rgb
            .iter()
            .flat_map(|px| px.map(|c| quantize(c, BitDepth::Eight) as u8))
            .collect();
        let buf = ImageBuffer::<Rgb<u8>, _>::from_raw(self.width as u32, self.height as u32, data)
            .expect("buffer length matches dimensions");
        let mut bytes = Vec::new();
        DynamicImage::ImageRgb8(buf).write_to(&mut Cursor::new(&mut bytes), ImageFormat::Png)?;
        Ok(bytes)
    }

    pub fn from_png_bytes(bytes: &[u8]) -> Result<TextureImage, ImageError> {
        let image = image::load_from_memory_with_format(bytes, ImageFormat::Png)?;
        let (w, h) = (image.width() as usize, image.height() as usize);
        if w == 0 || h == 0 {
            return Err(ImageError::ZeroSize);
        }
        let rgb = image
            .to_rgb8()
            .pixels()
            .map(|p| [p[0], p[1], p[2]].map(|c| c as f64 / 255.0))
            .collect();
        TextureImage::new(w, h, rgb)
    }
}

pub fn luminance(t: &TextureImage) -> Heightfield {
    t.luminance()
}

pub fn load_texture(path: impl AsRef<Path>) -> Result<TextureImage, ImageError> {
    TextureImage::from_png_bytes(&std::fs::read(path)?)
}

pub fn save_texture(t: &TextureImage, path: impl AsRef<Path>) -> Result<(), ImageError> {
    std::fs::write(path, t.to_png_bytes()?)?;
    Ok(())
}

#[inline]
fn luma709(rgb: [f64; 3]) -> f64 {
    (0.2126 * rgb[0] + 0.7152 * rgb[1] + 0.0722 * rgb[2]).clamp(0.0, 1.0)
}

#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + (b - a) * t
}

/// Neighbor indices and blend weight along one axis for a normalized coordinate.
#[inline]
fn axis_weights(coord: f64, size: usize) -> (usize, usize, f64) {
    let c = if coord.is_nan() { 0.0 } else { coord.clamp(0.0, 1.0) };
    let x = (c * size as f64 - 0.5).clamp(0.0, (size - 1) as f64);
    let x0 = x.floor() as usize;
    let x1 = (x0 + 1).min(size - 1);
    (x0, x1, x - x0 as f64)
}

fn rotate_grid<T: Copy>(w: usize, h: usize, data: &[T], quarter_turns: u32) -> (usize, usize, Vec<T>) {
    let (mut w, mut h) = (w, h);
    let mut data = data.to_vec();
    for _ in 0..quarter_turns % 4 {
        // counterclockwise: out(x, y) = in(w - 1 - y, x), output is h x w
        let mut out = Vec::with_capacity(data.len());
        for y in 0..w {
            for x in 0..h {
                out.push(data[x * w + (w - 1 - y)]);
            }
        }
        data = out;
        std::mem::swap(&mut w, &mut h);
    }
    (w, h, data)
}
