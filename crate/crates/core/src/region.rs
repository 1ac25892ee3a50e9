use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An axis-aligned rectangle. `(x, y)` is the corner with the smallest
/// column and row index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Region {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl Region {
    pub fn new(x: usize, y: usize, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "region {width}x{height} has a zero dimension"
            )));
        }
        Ok(Self {
            x,
            y,
            width,
            height,
        })
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self {
            x: 0,
            y: 0,
            width,
            height,
        }
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    /// `x + width <= image_width && y + height <= image_height`.
    pub fn fits(&self, image_width: usize, image_height: usize) -> bool {
        self.width >= 1
            && self.height >= 1
            && self.x + self.width <= image_width
            && self.y + self.height <= image_height
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x && x < self.x + self.width && y >= self.y && y < self.y + self.height
    }

    pub(crate) fn check_fits(&self, image_width: usize, image_height: usize) -> Result<()> {
        if self.fits(image_width, image_height) {
            Ok(())
        } else {
            Err(Error::RegionOutOfBounds {
                region: self.to_string(),
                width: image_width,
                height: image_height,
            })
        }
    }
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({}, {}) {}x{}",
            self.x, self.y, self.width, self.height
        )
    }
}
