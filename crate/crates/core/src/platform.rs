//! Target platform model: managed beans, services and event handlers planned
//! from the primitives of a form.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{codes, Diagnostic};
use crate::kdm::{CallableUnit, CodeModel, Origin, Screen, UiResource};
use crate::naming::{camel_case, pascal_case, unique_name};
use crate::primitives::{CodeOrigin, PrimitivesRoot};

/// Class and method an event handler or service method was mapped to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodRef {
    pub class: String,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserInterfaceComponent {
    pub id: String,
    pub item: String,
    pub ui_resource: crate::kdm::ElementId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserInterfaceView {
    pub id: String,
    pub name: String,
    pub screen: crate::kdm::ElementId,
    pub components: Vec<UserInterfaceComponent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManagedBeanAttribute {
    pub id: String,
    pub name: String,
    pub component: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventHandler {
    pub id: String,
    pub name: String,
    pub code: String,
    pub component: String,
    pub method: Option<MethodRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManagedBean {
    pub id: String,
    pub name: String,
    pub window: String,
    /// Data block of the window; qualifies UI names.
    pub block: String,
    pub view: String,
    pub attributes: Vec<ManagedBeanAttribute>,
    pub event_handlers: Vec<EventHandler>,
    pub used_services: Vec<String>,
    /// First and last descriptor line of the window.
    pub lines: (u32, u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ServiceKind {
    Controller,
    App,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum ServiceMethod {
    HelperServiceMethod {
        code: String,
        method: Option<MethodRef>,
    },
    EventHandlerServiceMethod {
        code: String,
        handler: String,
        ordinal: u32,
        method: Option<MethodRef>,
    },
}

impl ServiceMethod {
    pub fn method(&self) -> Option<&MethodRef> {
        match self {
            ServiceMethod::HelperServiceMethod { method, .. }
            | ServiceMethod::EventHandlerServiceMethod { method, .. } => method.as_ref(),
        }
    }

    pub fn code(&self) -> &str {
        match self {
            ServiceMethod::HelperServiceMethod { code, .. } | ServiceMethod::EventHandlerServiceMethod { code, .. } => {
                code
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Service {
    pub id: String,
    pub name: String,
    pub kind: ServiceKind,
    /// Managed bean this controller serves; `None` for the APP service.
    pub bean: Option<String>,
    pub methods: Vec<ServiceMethod>,
    pub lines: (u32, u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetPlatformModel {
    pub form_name: String,
    pub file: String,
    pub managed_beans: Vec<ManagedBean>,
    pub services: Vec<Service>,
    pub views: Vec<UserInterfaceView>,
}

impl TargetPlatformModel {
    pub fn service(&self, id: &str) -> Option<&Service> {
        self.services.iter().find(|s| s.id == id)
    }

    pub fn app_service(&self) -> Option<&Service> {
        self.services.iter().find(|s| s.kind == ServiceKind::App)
    }

    pub fn controller_of(&self, bean: &str) -> Option<&Service> {
        self.services
            .iter()
            .find(|s| s.kind == ServiceKind::Controller && s.bean.as_deref() == Some(bean))
    }

    pub fn event_handlers(&self) -> impl Iterator<Item = &EventHandler> {
        self.managed_beans.iter().flat_map(|b| b.event_handlers.iter())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("platform serialize")
    }

    pub fn from_json(text: &str) -> Result<TargetPlatformModel, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NavigationError {
    #[error("`{0}` is not a trigger")]
    NotATrigger(String),
    #[error("data-block trigger `{0}` has no UI resource")]
    DataBlockTrigger(String),
    #[error("`{0}` refers to a missing screen or resource")]
    Dangling(String),
}

/// Walks from a trigger up to its UI resource and owning screen.
pub fn navigate_to_screen<'m>(
    unit: &CallableUnit,
    model: &'m CodeModel,
) -> Result<(&'m Screen, &'m UiResource), NavigationError> {
    if unit.origin != Origin::Trigger {
        return Err(NavigationError::NotATrigger(unit.name.clone()));
    }
    let Some(r) = unit.ui_resource else {
        return Err(NavigationError::DataBlockTrigger(unit.name.clone()));
    };
    let resource = model
        .ui_resource(r)
        .ok_or_else(|| NavigationError::Dangling(unit.name.clone()))?;
    let screen = model
        .screen(resource.screen)
        .ok_or_else(|| NavigationError::Dangling(unit.name.clone()))?;
    Ok((screen, resource))
}

pub struct PlatformPlan {
    pub model: TargetPlatformModel,
    pub diagnostics: Vec<Diagnostic>,
}

fn calls_program_unit(root: &PrimitivesRoot, code: &str) -> bool {
    root.code(code)
        .is_some_and(|c| c.primitives.iter().any(|p| !p.called_codes().is_empty()))
}

pub fn primitives_to_platform(root: &PrimitivesRoot, model: &CodeModel) -> PlatformPlan {
    let mut diagnostics = Vec::new();
    let mut beans: Vec<ManagedBean> = Vec::new();
    let mut services: Vec<Service> = Vec::new();
    let mut views: Vec<UserInterfaceView> = Vec::new();
    let mut window_ids = BTreeSet::new();
    let mut component_n = 0;
    let mut handler_n = 0;

    let app_id = "s0".to_string();
    let has_units = root.codes.iter().any(|c| c.origin_kind == CodeOrigin::ProgramUnit);

    for code in root.codes.iter().filter(|c| c.origin_kind == CodeOrigin::Trigger) {
        let Some(unit) = model.callable(code.origin) else {
            diagnostics.push(Diagnostic::error(
                codes::UNRESOLVED_CODE,
                format!("code {} refers to missing element {}", code.id, code.origin),
            ));
            continue;
        };
        let at = |d: Diagnostic| d.at(&unit.source_ref.file, unit.source_ref.span.line, unit.source_ref.span.col);
        let (screen, resource) = match navigate_to_screen(unit, model) {
            Ok(x) => x,
            Err(NavigationError::DataBlockTrigger(name)) => {
                diagnostics.push(at(Diagnostic::warning(
                    codes::DATA_BLOCK_TRIGGER,
                    format!("data-block trigger skipped: {name}.{}", unit.event.as_deref().unwrap_or("")),
                )));
                continue;
            }
            Err(e) => {
                diagnostics.push(at(Diagnostic::error(codes::UNRESOLVED_CODE, e.to_string())));
                continue;
            }
        };
        if code.primitives.is_empty() {
            diagnostics.push(at(Diagnostic::warning(
                codes::EMPTY_TRIGGER,
                format!("empty trigger skipped: {}.{}", unit.name, unit.event.as_deref().unwrap_or("")),
            )));
            continue;
        }

        let bi = match views.iter().position(|v| v.screen == screen.id) {
            Some(i) => i,
            None => {
                let n = views.len() + 1;
                let window_id = unique_name(&pascal_case(&screen.name), &mut window_ids);
                views.push(UserInterfaceView {
                    id: format!("view{n}"),
                    name: screen.name.clone(),
                    screen: screen.id,
                    components: Vec::new(),
                });
                let service_id = format!("s{n}");
                beans.push(ManagedBean {
                    id: format!("mb{n}"),
                    name: format!("{window_id}ManagedBean"),
                    window: screen.name.clone(),
                    block: screen.block.clone(),
                    view: format!("view{n}"),
                    attributes: Vec::new(),
                    event_handlers: Vec::new(),
                    used_services: vec![service_id.clone()],
                    lines: (screen.source_ref.span.line, screen.source_ref.span.end_line),
                });
                services.push(Service {
                    id: service_id,
                    name: format!("{window_id}Service"),
                    kind: ServiceKind::Controller,
                    bean: Some(format!("mb{n}")),
                    methods: Vec::new(),
                    lines: (screen.source_ref.span.line, screen.source_ref.span.end_line),
                });
                views.len() - 1
            }
        };

        let comp_id = match views[bi].components.iter().find(|c| c.ui_resource == resource.id) {
            Some(c) => c.id.clone(),
            None => {
                component_n += 1;
                let id = format!("comp{component_n}");
                views[bi].components.push(UserInterfaceComponent {
                    id: id.clone(),
                    item: resource.name.clone(),
                    ui_resource: resource.id,
                });
                beans[bi].attributes.push(ManagedBeanAttribute {
                    id: format!("attr{component_n}"),
                    name: camel_case(&resource.name),
                    component: id.clone(),
                });
                id
            }
        };
        handler_n += 1;
        let event = unit.event.as_deref().unwrap_or("");
        beans[bi].event_handlers.push(EventHandler {
            id: format!("eh{handler_n}"),
            name: format!("{}{}", camel_case(&resource.name), pascal_case(event)),
            code: code.id.clone(),
            component: comp_id,
            method: None,
        });
        if has_units && calls_program_unit(root, &code.id) && !beans[bi].used_services.contains(&app_id) {
            beans[bi].used_services.push(app_id.clone());
        }
    }

    if has_units {
        let spans: Vec<_> = root
            .codes
            .iter()
            .filter(|c| c.origin_kind == CodeOrigin::ProgramUnit)
            .filter_map(|c| model.callable(c.origin))
            .map(|u| (u.source_ref.span.line, u.source_ref.span.end_line))
            .collect();
        let lines = (
            spans.iter().map(|s| s.0).min().unwrap_or(0),
            spans.iter().map(|s| s.1).max().unwrap_or(0),
        );
        services.push(Service {
            id: app_id,
            name: format!("{}AppService", pascal_case(&root.form_name)),
            kind: ServiceKind::App,
            bean: None,
            methods: root
                .codes
                .iter()
                .filter(|c| c.origin_kind == CodeOrigin::ProgramUnit)
                .map(|c| ServiceMethod::HelperServiceMethod {
                    code: c.id.clone(),
                    method: None,
                })
                .collect(),
            lines,
        });
    }

    PlatformPlan {
        model: TargetPlatformModel {
            form_name: root.form_name.clone(),
            file: model.file.clone(),
            managed_beans: beans,
            services,
            views,
        },
        diagnostics,
    }
}
