//! Saving and reloading final world states for later validation.

use std::fs;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netsim::WorldState;

pub const WORLD_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct WorldFile {
    version: u32,
    world: WorldState,
}

pub fn save_world(world: &WorldState, path: impl AsRef<FsPath>) -> Result<()> {
    let file = WorldFile {
        version: WORLD_VERSION,
        world: world.clone(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("worlds always serialize");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn load_world(path: impl AsRef<FsPath>) -> Result<WorldState> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let file: WorldFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    if file.version != WORLD_VERSION {
        return Err(Error::Parse {
            path: path.display().to_string(),
            message: format!(
                "unsupported world version {} (expected {WORLD_VERSION})",
                file.version
            ),
        });
    }
    Ok(file.world)
}
