//! Fixed catalog of indoor region labels and the human activities that can
//! be placed in each of them (five per region).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

macro_rules! regions {
    ($( $variant:ident => $label:literal, $name:literal; )*) => {
        /// Indoor region label attached to every viewpoint and activity.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Region {
            $( $variant, )*
        }

        impl Region {
            pub const ALL: &'static [Region] = &[ $( Region::$variant, )* ];

            /// Stable wire label.
            pub fn label(self) -> &'static str {
                match self { $( Region::$variant => $label, )* }
            }

            /// Human-readable name.
            pub fn display_name(self) -> &'static str {
                match self { $( Region::$variant => $name, )* }
            }
        }

        impl FromStr for Region {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $( $label => Ok(Region::$variant), )*
                    other => Err(format!("unknown region label `{other}`")),
                }
            }
        }
    };
}

regions! {
    Bathroom => "bathroom", "bathroom";
    Bedroom => "bedroom", "bedroom";
    Closet => "closet", "closet";
    DiningRoom => "dining_room", "dining room";
    Entryway => "entryway", "entryway/foyer/lobby";
    FamilyRoom => "family_room", "family room";
    Garage => "garage", "garage";
    Hallway => "hallway", "hallway";
    Library => "library", "library";
    LaundryRoom => "laundry_room", "laundry room/mudroom";
    Kitchen => "kitchen", "kitchen";
    LivingRoom => "living_room", "living room";
    MeetingRoom => "meeting_room", "meeting room/conference room";
    Lounge => "lounge", "lounge";
    Office => "office", "office";
    Porch => "porch", "porch/terrace/deck/driveway";
    RecreationRoom => "recreation_room", "recreation/game room";
    Stairs => "stairs", "stairs";
    Toilet => "toilet", "toilet";
    UtilityRoom => "utility_room", "utility room/tool room";
    TvRoom => "tv_room", "TV room";
    WorkoutRoom => "workout_room", "workout/gym/exercise room";
    Outdoor => "outdoor", "outdoor areas containing grass, plants, bushes, trees, etc.";
    Balcony => "balcony", "balcony";
    OtherRoom => "other_room", "other room";
    Bar => "bar", "bar";
    Classroom => "classroom", "classroom";
    DiningBooth => "dining_booth", "dining booth";
    Spa => "spa", "spa/sauna";
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for Region {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for Region {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One catalog entry: an activity description bound to a region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogActivity {
    pub id: String,
    pub description: String,
    pub region: Region,
}

const DESCRIPTIONS: &[(Region, [&str; 5])] = &[
    (
        Region::Bathroom,
        [
            "brushing teeth at the sink",
            "washing hands and drying them with a towel",
            "combing hair in front of the mirror",
            "wiping down the counter",
            "stepping out of the shower and reaching for a robe",
        ],
    ),
    (
        Region::Bedroom,
        [
            "making the bed",
            "folding clothes on the bed",
            "stretching after waking up",
            "reading a book while sitting on the bed",
            "walking to the wardrobe to pick an outfit",
        ],
    ),
    (
        Region::Closet,
        [
            "hanging a jacket on the rail",
            "searching through boxes on a shelf",
            "trying on a pair of shoes",
            "sorting folded sweaters",
            "pulling a suitcase out from the back",
        ],
    ),
    (
        Region::DiningRoom,
        [
            "setting plates on the table",
            "eating dinner while seated",
            "pouring water into glasses",
            "clearing dishes from the table",
            "pulling out a chair to sit down",
        ],
    ),
    (
        Region::Entryway,
        [
            "taking off a coat by the door",
            "checking the mail",
            "greeting a visitor at the entrance",
            "putting on shoes before leaving",
            "walking in carrying grocery bags",
        ],
    ),
    (
        Region::FamilyRoom,
        [
            "playing a board game on the floor",
            "tidying cushions on the sofa",
            "watching a movie from the couch",
            "playing with a toddler",
            "vacuuming the rug",
        ],
    ),
    (
        Region::Garage,
        [
            "loading boxes into a car trunk",
            "fixing a bicycle",
            "sweeping the floor",
            "searching the tool rack",
            "carrying a ladder along the wall",
        ],
    ),
    (
        Region::Hallway,
        [
            "walking down the hallway",
            "talking on the phone while pacing",
            "hanging a picture on the wall",
            "carrying a laundry basket through",
            "pausing to look at a family photo",
        ],
    ),
    (
        Region::Library,
        [
            "browsing books on a shelf",
            "reading at a desk",
            "returning a book to its place",
            "taking notes from an open book",
            "climbing a step stool to reach a top shelf",
        ],
    ),
    (
        Region::LaundryRoom,
        [
            "loading the washing machine",
            "ironing a shirt",
            "folding towels",
            "hanging wet clothes to dry",
            "measuring detergent",
        ],
    ),
    (
        Region::Kitchen,
        [
            "chopping vegetables at the counter",
            "stirring a pot on the stove",
            "washing dishes at the sink",
            "taking food out of the fridge",
            "pouring coffee from a machine",
        ],
    ),
    (
        Region::LivingRoom,
        [
            "sitting on the sofa watching TV",
            "dusting the bookshelf",
            "arranging flowers in a vase",
            "practicing yoga on a mat",
            "walking around while on a call",
        ],
    ),
    (
        Region::MeetingRoom,
        [
            "presenting slides to colleagues",
            "writing on a whiteboard",
            "taking notes during a meeting",
            "setting up a projector",
            "shaking hands with a client",
        ],
    ),
    (
        Region::Lounge,
        [
            "relaxing in an armchair",
            "chatting with a friend over drinks",
            "reading a magazine",
            "browsing on a tablet",
            "stretching legs on a footrest",
        ],
    ),
    (
        Region::Office,
        [
            "typing on a laptop",
            "filing documents in a cabinet",
            "making a phone call at the desk",
            "printing a report",
            "adjusting the office chair",
        ],
    ),
    (
        Region::Porch,
        [
            "watering potted plants",
            "sitting in a rocking chair",
            "sweeping leaves off the deck",
            "washing a car in the driveway",
            "waving to a neighbor",
        ],
    ),
    (
        Region::RecreationRoom,
        [
            "playing pool",
            "throwing darts",
            "playing a video game",
            "playing table tennis",
            "setting up a card game",
        ],
    ),
    (
        Region::Stairs,
        [
            "walking up the stairs",
            "walking down the stairs holding the rail",
            "carrying a box upstairs",
            "sitting on a step tying shoelaces",
            "vacuuming the stair carpet",
        ],
    ),
    (
        Region::Toilet,
        [
            "washing hands",
            "replacing the toilet paper roll",
            "cleaning the toilet bowl",
            "checking the mirror",
            "refilling the soap dispenser",
        ],
    ),
    (
        Region::UtilityRoom,
        [
            "checking the water heater",
            "organizing cleaning supplies",
            "resetting the circuit breaker",
            "storing a vacuum cleaner",
            "repairing a broken shelf",
        ],
    ),
    (
        Region::TvRoom,
        [
            "switching channels with the remote",
            "adjusting the volume on a soundbar",
            "sitting on a bean bag watching a show",
            "connecting a game console",
            "eating snacks in front of the TV",
        ],
    ),
    (
        Region::WorkoutRoom,
        [
            "running on a treadmill",
            "lifting dumbbells",
            "doing push-ups on a mat",
            "riding a stationary bike",
            "stretching before a workout",
        ],
    ),
    (
        Region::Outdoor,
        [
            "mowing the lawn",
            "pruning bushes",
            "planting flowers in a bed",
            "raking leaves",
            "walking a dog along the path",
        ],
    ),
    (
        Region::Balcony,
        [
            "leaning on the railing enjoying the view",
            "hanging laundry on a line",
            "drinking coffee at a small table",
            "watering a herb planter",
            "taking photos of the skyline",
        ],
    ),
    (
        Region::OtherRoom,
        [
            "moving furniture",
            "painting a wall",
            "unpacking moving boxes",
            "playing a piano",
            "sorting items on a table",
        ],
    ),
    (
        Region::Bar,
        [
            "mixing a cocktail",
            "wiping the bar counter",
            "sitting on a bar stool",
            "restocking bottles",
            "serving a drink",
        ],
    ),
    (
        Region::Classroom,
        [
            "writing on the blackboard",
            "grading papers at the desk",
            "arranging chairs in rows",
            "handing out worksheets",
            "raising a hand to ask a question",
        ],
    ),
    (
        Region::DiningBooth,
        [
            "eating breakfast in the booth",
            "sliding into the booth seat",
            "reading the menu",
            "wiping the booth table",
            "chatting over coffee",
        ],
    ),
    (
        Region::Spa,
        [
            "relaxing in the sauna",
            "lying on a massage table",
            "adjusting the sauna temperature",
            "pouring water on the sauna stones",
            "wrapping up in a towel after the sauna",
        ],
    ),
];

/// The full activity catalog, ordered by region then index.
pub fn activity_catalog() -> Vec<CatalogActivity> {
    DESCRIPTIONS
        .iter()
        .flat_map(|(region, descs)| {
            descs.iter().enumerate().map(move |(i, d)| CatalogActivity {
                id: format!("{}-{}", region.label(), i + 1),
                description: (*d).to_string(),
                region: *region,
            })
        })
        .collect()
}

/// Activities whose region matches `region`.
pub fn activities_for(region: Region) -> Vec<CatalogActivity> {
    activity_catalog()
        .into_iter()
        .filter(|a| a.region == region)
        .collect()
}
