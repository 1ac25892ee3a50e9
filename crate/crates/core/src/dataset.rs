use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::image::{Image, ImageDims};

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetItem {
    pub image: Image,
    /// 0-based class index.
    pub label: Option<u32>,
    pub source_id: String,
}

/// An ordered set of same-shaped images with unique ids.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DatasetView {
    items: Vec<DatasetItem>,
    class_names: Option<Vec<String>>,
}

impl DatasetView {
    pub fn new(items: Vec<DatasetItem>) -> Result<Self> {
        if let Some(first) = items.first() {
            let dims = first.image.dims();
            for item in &items[1..] {
                if item.image.dims() != dims {
                    return Err(Error::MixedDimensions {
                        first: dims.to_string(),
                        other: item.image.dims().to_string(),
                        source_id: item.source_id.clone(),
                    });
                }
            }
        }
        let mut seen = HashSet::with_capacity(items.len());
        for item in &items {
            if !seen.insert(item.source_id.as_str()) {
                return Err(Error::DuplicateId(item.source_id.clone()));
            }
        }
        Ok(Self {
            items,
            class_names: None,
        })
    }

    /// Class names indexed by label, when the source had named classes.
    pub fn with_class_names(mut self, names: Option<Vec<String>>) -> Self {
        self.class_names = names;
        self
    }

    pub fn class_names(&self) -> Option<&[String]> {
        self.class_names.as_deref()
    }

    pub fn items(&self) -> &[DatasetItem] {
        &self.items
    }

    pub fn into_items(self) -> Vec<DatasetItem> {
        self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Shared image shape, or `None` for an empty dataset.
    pub fn dims(&self) -> Option<ImageDims> {
        self.items.first().map(|i| i.image.dims())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(id: &str, w: usize) -> DatasetItem {
        DatasetItem {
            image: Image::filled(w, 2, 3, 0.0).unwrap(),
            label: None,
            source_id: id.into(),
        }
    }

    #[test]
    fn rejects_mixed_dimensions() {
        assert!(matches!(
            DatasetView::new(vec![item("a", 2), item("b", 3)]),
            Err(Error::MixedDimensions { .. })
        ));
    }

    #[test]
    fn rejects_duplicate_ids() {
        assert!(matches!(
            DatasetView::new(vec![item("a", 2), item("a", 2)]),
            Err(Error::DuplicateId(_))
        ));
    }

    #[test]
    fn empty_is_fine() {
        let d = DatasetView::new(vec![]).unwrap();
        assert!(d.is_empty());
        assert_eq!(d.dims(), None);
    }
}
