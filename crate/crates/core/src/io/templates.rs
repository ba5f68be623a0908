use std::path::Path;

use serde::{Deserialize, Serialize};

use super::png::{load_gray, save_gray};
use crate::error::{Error, Result};
use crate::scale::{MarkerTemplate, RulerTemplates, SizeClass};

/// Environment variable naming the default template-asset directory.
pub const TEMPLATE_DIR_ENV: &str = "FETBIO_TEMPLATES";

/// JSON stored next to each template PNG.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateSidecar {
    pub anchor: [usize; 2],
    pub size_class: SizeClass,
}

fn file_stem(size: SizeClass) -> &'static str {
    match size {
        SizeClass::Major => "major",
        SizeClass::Minor => "minor",
    }
}

fn load_one(dir: &Path, size: SizeClass) -> Result<MarkerTemplate> {
    let stem = file_stem(size);
    let patch = load_gray(dir.join(format!("{stem}.png")))?;
    let sidecar_path = dir.join(format!("{stem}.json"));
    let text = std::fs::read_to_string(&sidecar_path).map_err(|e| Error::UnreadableFile {
        path: sidecar_path.clone(),
        reason: e.to_string(),
    })?;
    let sidecar: TemplateSidecar = serde_json::from_str(&text)?;
    if sidecar.size_class != size {
        return Err(Error::InvalidInput(format!(
            "{} declares size class {:?}",
            sidecar_path.display(),
            sidecar.size_class
        )));
    }
    MarkerTemplate::new(patch, (sidecar.anchor[0], sidecar.anchor[1]), size)
}

/// Loads `major.png`/`major.json` and `minor.png`/`minor.json` from `dir`.
pub fn load_templates(dir: impl AsRef<Path>) -> Result<RulerTemplates> {
    let dir = dir.as_ref();
    Ok(RulerTemplates {
        major: load_one(dir, SizeClass::Major)?,
        minor: load_one(dir, SizeClass::Minor)?,
    })
}

pub fn save_templates(dir: impl AsRef<Path>, templates: &RulerTemplates) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    for t in [&templates.major, &templates.minor] {
        let stem = file_stem(t.size);
        save_gray(dir.join(format!("{stem}.png")), &t.patch)?;
        let sidecar = TemplateSidecar {
            anchor: [t.anchor.0, t.anchor.1],
            size_class: t.size,
        };
        std::fs::write(
            dir.join(format!("{stem}.json")),
            serde_json::to_string_pretty(&sidecar)? + "\n",
        )?;
    }
    Ok(())
}
