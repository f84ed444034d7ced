use std::collections::BTreeMap;

use crate::element::{DataElement, NotTextVr};
use crate::tag::Tag;

/// An ordered collection of data elements. Iteration always yields strictly
/// ascending tags; the parser rejects duplicates before they get here.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DataSet {
    elements: BTreeMap<Tag, DataElement>,
}

impl DataSet {
    pub fn new() -> Self {
        DataSet::default()
    }

    /// Inserts an element, replacing any previous element with the same tag.
    pub fn insert(&mut self, element: DataElement) -> Option<DataElement> {
        self.elements.insert(element.tag(), element)
    }

    pub fn get(&self, tag: Tag) -> Option<&DataElement> {
        self.elements.get(&tag)
    }

    pub fn get_mut(&mut self, tag: Tag) -> Option<&mut DataElement> {
        self.elements.get_mut(&tag)
    }

    pub fn remove(&mut self, tag: Tag) -> Option<DataElement> {
        self.elements.remove(&tag)
    }

    pub fn contains(&self, tag: Tag) -> bool {
        self.elements.contains_key(&tag)
    }

    pub fn iter(&self) -> impl Iterator<Item = &DataElement> {
        self.elements.values()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut DataElement> {
        self.elements.values_mut()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Text value of `tag` with trailing padding removed, or `None` when the
    /// tag is absent. Fails with `NotTextVr` if the element is binary or SQ.
    pub fn string_value(&self, tag: Tag) -> Result<Option<String>, NotTextVr> {
        match self.get(tag) {
            None => Ok(None),
            Some(el) => el.string_value().map(Some),
        }
    }
}

impl FromIterator<DataElement> for DataSet {
    fn from_iter<T: IntoIterator<Item = DataElement>>(iter: T) -> Self {
        let mut ds = DataSet::new();
        for el in iter {
            ds.insert(el);
        }
        ds
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vr::Vr;

    #[test]
    fn iteration_is_tag_ordered() {
        let mut ds = DataSet::new();
        ds.insert(DataElement::new_text(Tag::new(0x0020, 0x000D), Vr::UI, "1.2"));
        ds.insert(DataElement::new_text(Tag::new(0x0008, 0x0016), Vr::UI, "1.4"));
        ds.insert(DataElement::new_text(Tag::new(0x0010, 0x0010), Vr::PN, "X"));
        let tags: Vec<Tag> = ds.iter().map(|e| e.tag()).collect();
        assert_eq!(
            tags,
            vec![
                Tag::new(0x0008, 0x0016),
                Tag::new(0x0010, 0x0010),
                Tag::new(0x0020, 0x000D)
            ]
        );
    }

    #[test]
    fn string_value_absent_tag_is_none() {
        let ds = DataSet::new();
        assert_eq!(ds.string_value(Tag::new(0x0008, 0x0016)).unwrap(), None);
    }

    #[test]
    fn string_value_strips_padding() {
        let mut ds = DataSet::new();
        ds.insert(DataElement::new_text(Tag::new(0x0010, 0x0040), Vr::CS, "M"));
        assert_eq!(
            ds.string_value(Tag::new(0x0010, 0x0040)).unwrap().as_deref(),
            Some("M")
        );
    }
}
