//! Repository loading: reads `iods/*.xml`, `modules/*.xml`, `tables/*.xml`
//! and `sopclass-map.txt` from a description directory, validates every
//! cross-reference and returns an immutable [`Registry`]. Reloading builds a
//! fresh value; consumers holding the old one keep a consistent snapshot.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::xml::{parse_iod, parse_module, parse_table, DescriptionError};
use super::{
    ElementRequirement, IodDescription, MacroTable, ModuleDescription, RequirementEntry,
};

const MAX_TABLE_DEPTH: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum RepoError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Description {
        path: PathBuf,
        source: DescriptionError,
    },
    #[error("IOD {iod:?} includes unresolved module {module:?}")]
    UnresolvedModule { iod: String, module: String },
    #[error("{referrer} includes unresolved table {table:?}")]
    UnresolvedTable { referrer: String, table: String },
    #[error("table include cycle: {chain}")]
    IncludeCycle { chain: String },
    #[error("table includes nest deeper than {MAX_TABLE_DEPTH} levels: {chain}")]
    NestingTooDeep { chain: String },
    #[error("{scope}: condition references undefined precondition {idref:?}")]
    UnresolvedIdref { scope: String, idref: String },
    #[error("sopclass-map.txt line {line}: IOD {name:?} has no description file")]
    UnknownIodInMap {
        line: usize,
        uid: String,
        name: String,
    },
    #[error("sopclass-map.txt line {line}: duplicate mapping for UID {uid:?}")]
    DuplicateMapUid { line: usize, uid: String },
    #[error("sopclass-map.txt line {line}: expected UID<TAB>IOD-name")]
    BadMapLine { line: usize },
}

/// The loaded description repository. Immutable once built.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    iods: BTreeMap<String, IodDescription>,
    modules: BTreeMap<String, ModuleDescription>,
    tables: BTreeMap<String, MacroTable>,
    sop_map: BTreeMap<String, String>,
}

/// Result of [`load_repository`]: the registry plus warning-level notes
/// (for example IOD files that no SOP class maps to).
#[derive(Clone, Debug)]
pub struct RepoLoad {
    pub registry: Registry,
    pub warnings: Vec<String>,
}

impl Registry {
    pub fn empty() -> Registry {
        Registry::default()
    }

    /// Builds a registry from in-memory parts, running the same
    /// cross-reference validation as [`load_repository`]. IODs and modules
    /// are keyed by their `name`, tables by their `table_id`.
    pub fn build(
        iods: impl IntoIterator<Item = IodDescription>,
        modules: impl IntoIterator<Item = ModuleDescription>,
        tables: impl IntoIterator<Item = MacroTable>,
        sop_map: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Registry, RepoError> {
        let mut registry = Registry::empty();
        for iod in iods {
            registry.iods.insert(iod.name.clone(), iod);
        }
        for module in modules {
            registry.modules.insert(module.name.clone(), module);
        }
        for table in tables {
            registry.tables.insert(table.table_id.clone(), table);
        }
        for (idx, (uid, name)) in sop_map.into_iter().enumerate() {
            if !registry.iods.contains_key(&name) {
                return Err(RepoError::UnknownIodInMap {
                    line: idx + 1,
                    uid,
                    name,
                });
            }
            if registry.sop_map.insert(uid.clone(), name).is_some() {
                return Err(RepoError::DuplicateMapUid { line: idx + 1, uid });
            }
        }
        validate_cross_references(&registry)?;
        Ok(registry)
    }

    /// Exact-match lookup of the IOD mapped to a SOP Class UID.
    pub fn resolve_iod(&self, sop_class_uid: &str) -> Option<&IodDescription> {
        let name = self.sop_map.get(sop_class_uid)?;
        self.iods.get(name)
    }

    pub fn iod(&self, name: &str) -> Option<&IodDescription> {
        self.iods.get(name)
    }

    pub fn module(&self, name: &str) -> Option<&ModuleDescription> {
        self.modules.get(name)
    }

    pub fn table(&self, id: &str) -> Option<&MacroTable> {
        self.tables.get(id)
    }

    pub fn iod_names(&self) -> impl Iterator<Item = &str> {
        self.iods.keys().map(String::as_str)
    }

    pub fn module_names(&self) -> impl Iterator<Item = &str> {
        self.modules.keys().map(String::as_str)
    }

    pub fn sop_map(&self) -> &BTreeMap<String, String> {
        &self.sop_map
    }

    /// Requirements of a module in document order with macro tables expanded
    /// inline at their include position.
    pub fn expand_requirements<'a>(
        &'a self,
        module: &'a ModuleDescription,
    ) -> Result<Vec<&'a ElementRequirement>, RepoError> {
        let mut out = Vec::new();
        self.expand_entries(&module.requirements, &format!("module {:?}", module.name), 0, &mut out)?;
        Ok(out)
    }

    fn expand_entries<'a>(
        &'a self,
        entries: &'a [RequirementEntry],
        referrer: &str,
        depth: usize,
        out: &mut Vec<&'a ElementRequirement>,
    ) -> Result<(), RepoError> {
        for entry in entries {
            match entry {
                RequirementEntry::Element(req) => out.push(req),
                RequirementEntry::Table(inc) => {
                    if depth >= MAX_TABLE_DEPTH {
                        return Err(RepoError::NestingTooDeep {
                            chain: format!("{referrer} -> {}", inc.table_id),
                        });
                    }
                    let table =
                        self.tables
                            .get(&inc.table_id)
                            .ok_or_else(|| RepoError::UnresolvedTable {
                                referrer: referrer.to_string(),
                                table: inc.table_id.clone(),
                            })?;
                    self.expand_entries(
                        &table.requirements,
                        &format!("table {:?}", table.table_id),
                        depth + 1,
                        out,
                    )?;
                }
            }
        }
        Ok(())
    }
}

fn read_xml_files(dir: &Path) -> Result<Vec<(String, PathBuf, String)>, RepoError> {
    let mut out = Vec::new();
    if !dir.is_dir() {
        return Ok(out);
    }
    let entries = std::fs::read_dir(dir).map_err(|source| RepoError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "xml"))
        .collect();
    paths.sort();
    for path in paths {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let text = std::fs::read_to_string(&path).map_err(|source| RepoError::Io {
            path: path.clone(),
            source,
        })?;
        out.push((stem, path, text));
    }
    Ok(out)
}

/// Loads and validates a description repository directory.
pub fn load_repository(root: &Path) -> Result<RepoLoad, RepoError> {
    if !root.is_dir() {
        return Err(RepoError::Io {
            path: root.to_path_buf(),
            source: std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "repository directory does not exist",
            ),
        });
    }
    let mut registry = Registry::empty();
    let mut warnings = Vec::new();

    for (stem, path, text) in read_xml_files(&root.join("iods"))? {
        let mut iod = parse_iod(&text).map_err(|source| RepoError::Description {
            path: path.clone(),
            source,
        })?;
        iod.name = stem.clone();
        registry.iods.insert(stem, iod);
    }
    for (stem, path, text) in read_xml_files(&root.join("modules"))? {
        let mut module = parse_module(&text).map_err(|source| RepoError::Description {
            path: path.clone(),
            source,
        })?;
        module.name = stem.clone();
        registry.modules.insert(stem, module);
    }
    for (stem, path, text) in read_xml_files(&root.join("tables"))? {
        let table = parse_table(&text).map_err(|source| RepoError::Description {
            path: path.clone(),
            source,
        })?;
        if table.table_id != stem {
            warnings.push(format!(
                "table file {stem}.xml declares id {:?}",
                table.table_id
            ));
        }
        registry.tables.insert(table.table_id.clone(), table);
    }

    let map_path = root.join("sopclass-map.txt");
    if map_path.is_file() {
        let text = std::fs::read_to_string(&map_path).map_err(|source| RepoError::Io {
            path: map_path.clone(),
            source,
        })?;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (uid, name) = trimmed
                .split_once('\t')
                .ok_or(RepoError::BadMapLine { line })?;
            let (uid, name) = (uid.trim().to_string(), name.trim().to_string());
            if !registry.iods.contains_key(&name) {
                return Err(RepoError::UnknownIodInMap { line, uid, name });
            }
            if registry.sop_map.insert(uid.clone(), name).is_some() {
                return Err(RepoError::DuplicateMapUid { line, uid });
            }
        }
    }

    validate_cross_references(&registry)?;

    for name in registry.iods.keys() {
        if !registry.sop_map.values().any(|n| n == name) {
            warnings.push(format!(
                "IOD file {name}.xml is not mapped by sopclass-map.txt"
            ));
        }
    }

    Ok(RepoLoad { registry, warnings })
}

fn validate_cross_references(registry: &Registry) -> Result<(), RepoError> {
    // Modules referenced by IODs must exist.
    for (iod_name, iod) in &registry.iods {
        for include in &iod.includes {
            if !registry.modules.contains_key(&include.module_name) {
                return Err(RepoError::UnresolvedModule {
                    iod: iod_name.clone(),
                    module: include.module_name.clone(),
                });
            }
        }
    }

    // Table includes must resolve, without cycles and within the depth bound.
    for (name, module) in &registry.modules {
        let referrer = format!("module {name:?}");
        for entry in &module.requirements {
            if let RequirementEntry::Table(inc) = entry {
                walk_table(registry, &referrer, &inc.table_id, &mut Vec::new())?;
            }
        }
    }
    for (id, table) in &registry.tables {
        let referrer = format!("table {id:?}");
        for entry in &table.requirements {
            if let RequirementEntry::Table(inc) = entry {
                walk_table(registry, &referrer, &inc.table_id, &mut vec![id.clone()])?;
            }
        }
    }

    // Condition idrefs must resolve in scope: IOD-level defines for include
    // conditions; module-level plus including-IOD defines for requirement
    // conditions (macro tables inherit the including module's scope).
    for (iod_name, iod) in &registry.iods {
        let iod_ids: Vec<&str> = iod.defines.iter().map(|d| d.id.as_str()).collect();
        for include in &iod.includes {
            if let Some(condition) = &include.condition {
                for idref in condition.idrefs() {
                    if !iod_ids.contains(&idref) {
                        return Err(RepoError::UnresolvedIdref {
                            scope: format!("IOD {iod_name:?}"),
                            idref: idref.to_string(),
                        });
                    }
                }
            }
            let module = &registry.modules[&include.module_name];
            let mut scope_ids = iod_ids.clone();
            scope_ids.extend(module.defines.iter().map(|d| d.id.as_str()));
            let requirements = registry.expand_requirements(module)?;
            for req in requirements {
                check_requirement_idrefs(req, &scope_ids, iod_name, &include.module_name)?;
            }
        }
    }
    Ok(())
}

fn check_requirement_idrefs(
    req: &ElementRequirement,
    scope_ids: &[&str],
    iod_name: &str,
    module_name: &str,
) -> Result<(), RepoError> {
    if let Some(condition) = &req.condition {
        for idref in condition.idrefs() {
            if !scope_ids.contains(&idref) {
                return Err(RepoError::UnresolvedIdref {
                    scope: format!("module {module_name:?} included by IOD {iod_name:?}"),
                    idref: idref.to_string(),
                });
            }
        }
    }
    for item_req in req.item_requirements.iter().flatten() {
        check_requirement_idrefs(item_req, scope_ids, iod_name, module_name)?;
    }
    Ok(())
}

fn walk_table(
    registry: &Registry,
    referrer: &str,
    table_id: &str,
    stack: &mut Vec<String>,
) -> Result<(), RepoError> {
    if stack.iter().any(|s| s == table_id) {
        let mut chain = stack.join(" -> ");
        chain.push_str(" -> ");
        chain.push_str(table_id);
        return Err(RepoError::IncludeCycle { chain });
    }
    if stack.len() >= MAX_TABLE_DEPTH {
        let mut chain = stack.join(" -> ");
        chain.push_str(" -> ");
        chain.push_str(table_id);
        return Err(RepoError::NestingTooDeep { chain });
    }
    let table = registry
        .tables
        .get(table_id)
        .ok_or_else(|| RepoError::UnresolvedTable {
            referrer: referrer.to_string(),
            table: table_id.to_string(),
        })?;
    stack.push(table_id.to_string());
    for entry in &table.requirements {
        if let RequirementEntry::Table(inc) = entry {
            walk_table(registry, &format!("table {table_id:?}"), &inc.table_id, stack)?;
        }
    }
    stack.pop();
    Ok(())
}
