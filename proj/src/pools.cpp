// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Built-in value pools. ASCII only, so byte offsets equal character offsets.
// Apostrophes are excluded because the tokenizer treats ' as a symbol.

#include "plab/corpus.hpp"

namespace plab {
namespace {

constexpr const char* kFirstNames[] = {
    "Aaron",    "Abigail",  "Adrian",   "Aiden",    "Alana",    "Albert",   "Alexis",   "Alice",
    "Alma",     "Alvin",    "Amara",    "Amelia",   "Andre",    "Angela",   "Anika",    "Ansel",
    "Arden",    "Ariel",    "Arlo",     "Astrid",   "August",   "Aurora",   "Bailey",   "Beatrice",
    "Benedict", "Bianca",   "Blair",    "Bodhi",    "Brenda",   "Brooks",   "Bruno",    "Caleb",
    "Calista",  "Camden",   "Carmen",   "Casper",   "Cecilia",  "Cedric",   "Celeste",  "Chandler",
    "Clara",    "Clement",  "Colette",  "Conrad",   "Cora",     "Dahlia",   "Dalton",   "Damian",
    "Daphne",   "Darius",   "Delia",    "Dexter",   "Dimitri",  "Dorian",   "Eden",     "Edgar",
    "Edith",    "Elena",    "Elias",    "Eliza",    "Ellis",    "Elmer",    "Emeric",   "Emery",
    "Enzo",     "Esme",     "Ezra",     "Fabian",   "Faye",     "Felix",    "Fiona",    "Flora",
    "Floyd",    "Frida",    "Gabriel",  "Gemma",    "Gideon",   "Greta",    "Griffin",  "Gwen",
    "Hadley",   "Harlan",   "Harriet",  "Hazel",    "Hector",   "Helena",   "Hugo",     "Ida",
    "Ignatius", "Imani",    "Ingrid",   "Iris",     "Isaac",    "Ivan",     "Ivy",      "Jasper",
    "Jonah",    "Josie",    "Jude",     "Juliet",   "Juniper",  "Kai",      "Keira",    "Kendall",
    "Kenji",    "Kira",     "Lachlan",  "Lara",     "Laurel",   "Leander",  "Leona",    "Levi",
    "Liesel",   "Lionel",   "Lorenzo",  "Lucia",    "Lydia",    "Mabel",    "Magnus",   "Malcolm",
    "Margot",   "Marisol",  "Marlon",   "Matilda",  "Maxwell",  "Mei",      "Milo",     "Mina",
    "Mireille", "Nadia",    "Naomi",    "Nestor",   "Nico",     "Nina",     "Noel",     "Nora",
    "Octavia",  "Odette",   "Oren",     "Orla",     "Oscar",    "Otto",     "Paloma",   "Pascal",
    "Penelope", "Perry",    "Petra",    "Phoebe",   "Pierce",   "Priya",    "Quentin",  "Quinn",
    "Rafael",   "Ramona",   "Reuben",   "Rhea",     "Roland",   "Rosalind", "Rowan",    "Ruby",
    "Rufus",    "Sabine",   "Sage",     "Salma",    "Samir",    "Selma",    "Serena",   "Silas",
    "Simone",   "Soren",    "Stellan",  "Sylvie",   "Tamsin",   "Tariq",    "Thea",     "Theodore",
    "Tobias",   "Talia",    "Ulric",    "Una",      "Uriel",    "Valentina","Vera",     "Victor",
    "Viola",    "Wallace",  "Wendell",  "Willa",    "Winston",  "Wren",     "Xavier",   "Xenia",
    "Yara",     "Yusuf",    "Yvette",   "Zadie",    "Zane",     "Zara",     "Zeke",     "Zinnia",
    "Anselm",   "Briar",    "Corin",    "Delphine", "Evander",  "Fenella",  "Garrick",  "Honora",
};

constexpr const char* kLastNames[] = {
    "Abbott",    "Acosta",    "Adler",     "Alcott",    "Alvarez",   "Ames",      "Archer",    "Arnett",
    "Ashby",     "Avila",     "Bauer",     "Baxter",    "Beckett",   "Benitez",   "Bishop",    "Blackwood",
    "Bolton",    "Bowman",    "Bradford",  "Brennan",   "Briggs",    "Buchanan",  "Burke",     "Calloway",
    "Cardenas",  "Carver",    "Castillo",  "Chambers",  "Chen",      "Clayton",   "Coleman",   "Conway",
    "Crane",     "Crawford",  "Dalton",    "Darby",     "Delacroix", "Dempsey",   "Donovan",   "Doyle",
    "Drake",     "Duarte",    "Dunbar",    "Eastman",   "Ellison",   "Emerson",   "Espinoza",  "Everett",
    "Fairbanks", "Farrell",   "Fenwick",   "Figueroa",  "Finch",     "Fleming",   "Forsythe",  "Fowler",
    "Gallagher", "Garrison",  "Gentry",    "Gibbs",     "Goodwin",   "Grayson",   "Guerrero",  "Hale",
    "Halloway",  "Hammond",   "Harding",   "Hartley",   "Hawkins",   "Hendrix",   "Holloway",  "Huxley",
    "Ibarra",    "Ingram",    "Irving",    "Jacobs",    "Jarvis",    "Jennings",  "Kapoor",    "Keller",
    "Kensington","Kerrigan",  "Kimura",    "Kingsley",  "Knox",      "Lachance",  "Lambert",   "Langley",
    "Larkin",    "Lindqvist", "Lockhart",  "Lowell",    "Lucero",    "Lyons",     "Maddox",    "Mahoney",
    "Marchetti", "Marlowe",   "Mercer",    "Merritt",   "Montague",  "Moreau",    "Morrow",    "Nakamura",
    "Navarro",   "Nesbitt",   "Newcombe",  "Norwood",   "Novak",     "Oakley",    "Okafor",    "Olsen",
    "Ortega",    "Osborne",   "Pacheco",   "Padilla",   "Parrish",   "Pemberton", "Pennington","Petrov",
    "Prescott",  "Pryor",     "Quigley",   "Quintero",  "Radcliffe", "Ramsey",    "Rasmussen", "Redding",
    "Reyes",     "Rhodes",    "Ridley",    "Rinaldi",   "Rocha",     "Rourke",    "Salazar",   "Sandoval",
    "Sawyer",    "Schmidt",   "Sinclair",  "Slater",    "Sorensen",  "Stafford",  "Sterling",  "Sutton",
    "Takahashi", "Talbot",    "Tanaka",    "Thornton",  "Townsend",  "Trujillo",  "Underwood", "Upton",
    "Valdez",    "Vance",     "Vargas",    "Vasquez",   "Voss",      "Wakefield", "Waldron",   "Walsh",
    "Warrick",   "Weston",    "Whitaker",  "Whitmore",  "Wilder",    "Winslow",   "Wolfe",     "Woodward",
    "Xiong",     "Yamada",    "Yates",     "Yoder",     "Zamora",    "Zhang",     "Zimmerman", "Zuniga",
    "Ashford",   "Bellamy",   "Carrington","Davenport", "Ellsworth", "Fairchild", "Galloway",  "Hollister",
    "Iverson",   "Jardine",   "Kirkland",  "Lancaster", "Mansfield", "Northcott", "Ollivander","Pickering",
    "Quimby",    "Rutherford","Stanhope",  "Thackeray", "Umberto",   "Vickers",   "Wexford",   "Yardley",
    "Ambrose",   "Blythe",    "Cromwell",  "Dunmore",   "Eldridge",  "Falkner",   "Greaves",   "Hargrove",
};

// Colleges and companies have mostly distinct first words, so the first
// knowledge token identifies the value.
constexpr const char* kColleges[] = {
    "Stanford University",          "Princeton University",        "Rice University",
    "Duke University",              "Tulane University",           "Brandeis University",
    "Vanderbilt University",        "Cornell University",          "Dartmouth College",
    "Harvard University",           "Yale University",             "Brown University",
    "Columbia University",          "Emory University",            "Tufts University",
    "Northeastern University",      "Georgetown University",       "Villanova University",
    "Purdue University",            "Auburn University",           "Clemson University",
    "Baylor University",            "Fordham University",          "Drexel University",
    "Lehigh University",            "Bucknell University",         "Colgate University",
    "Wesleyan University",          "Amherst College",             "Williams College",
    "Swarthmore College",           "Pomona College",              "Oberlin College",
    "Carleton College",             "Bowdoin College",             "Middlebury College",
    "Vassar College",               "Wellesley College",           "Grinnell College",
    "Davidson College",             "Haverford College",           "Kenyon College",
    "Macalester College",           "Colby College",               "Hamilton College",
    "Smith College",                "Barnard College",             "Reed College",
    "Occidental College",           "Whitman College",             "Gonzaga University",
    "Creighton University",         "Marquette University",        "Xavier University",
    "Temple University",            "Rutgers University",          "Syracuse University",
};

constexpr const char* kMajors[] = {
    "Accounting",             "Anthropology",         "Architecture",         "Astronomy",
    "Biochemistry",           "Biology",              "Chemistry",            "Communications",
    "Computer Science",       "Criminology",          "Economics",            "Education",
    "Electrical Engineering", "English Literature",   "Finance",              "Geology",
    "History",                "Journalism",           "Linguistics",          "Marketing",
    "Mathematics",            "Mechanical Engineering","Music",               "Nursing",
    "Philosophy",             "Physics",              "Political Science",    "Psychology",
    "Sociology",              "Statistics",           "Zoology",              "Oceanography",
    "Theater",                "Urban Planning",       "Veterinary Medicine",  "Graphic Design",
};

constexpr const char* kHometowns[] = {
    "Santa Clarita, California", "Fresno, California",       "Sacramento, California",
    "Oakland, California",       "Pasadena, California",     "Bakersfield, California",
    "Anaheim, California",       "Riverside, California",    "Modesto, California",
    "Irvine, California",        "Portland, Oregon",         "Eugene, Oregon",
    "Salem, Oregon",             "Seattle, Washington",      "Spokane, Washington",
    "Tacoma, Washington",        "Boise, Idaho",             "Reno, Nevada",
    "Henderson, Nevada",         "Phoenix, Arizona",         "Tucson, Arizona",
    "Mesa, Arizona",             "Flagstaff, Arizona",       "Albuquerque, New Mexico",
    "Denver, Colorado",          "Boulder, Colorado",        "Aurora, Colorado",
    "Provo, Utah",               "Ogden, Utah",              "Billings, Montana",
    "Missoula, Montana",         "Cheyenne, Wyoming",        "Omaha, Nebraska",
    "Lincoln, Nebraska",         "Wichita, Kansas",          "Topeka, Kansas",
    "Tulsa, Oklahoma",           "Norman, Oklahoma",         "Dallas, Texas",
    "Houston, Texas",            "Austin, Texas",            "Lubbock, Texas",
    "Amarillo, Texas",           "Waco, Texas",              "Laredo, Texas",
    "Shreveport, Louisiana",     "Lafayette, Louisiana",     "Memphis, Tennessee",
    "Nashville, Tennessee",      "Knoxville, Tennessee",     "Chattanooga, Tennessee",
    "Louisville, Kentucky",      "Lexington, Kentucky",      "Birmingham, Alabama",
    "Montgomery, Alabama",       "Huntsville, Alabama",      "Jackson, Mississippi",
    "Atlanta, Georgia",          "Savannah, Georgia",        "Macon, Georgia",
    "Orlando, Florida",          "Tampa, Florida",           "Miami, Florida",
    "Gainesville, Florida",      "Tallahassee, Florida",     "Charleston, South Carolina",
    "Columbia, South Carolina",  "Charlotte, North Carolina","Raleigh, North Carolina",
    "Durham, North Carolina",    "Richmond, Virginia",       "Norfolk, Virginia",
    "Roanoke, Virginia",         "Baltimore, Maryland",      "Annapolis, Maryland",
    "Wilmington, Delaware",      "Philadelphia, Pennsylvania","Pittsburgh, Pennsylvania",
    "Scranton, Pennsylvania",    "Newark, New Jersey",       "Trenton, New Jersey",
    "Buffalo, New York",         "Rochester, New York",      "Albany, New York",
    "Ithaca, New York",          "Hartford, Connecticut",    "Providence, Rhode Island",
    "Boston, Massachusetts",     "Worcester, Massachusetts", "Springfield, Illinois",
    "Chicago, Illinois",         "Peoria, Illinois",         "Milwaukee, Wisconsin",
    "Madison, Wisconsin",        "Minneapolis, Minnesota",   "Duluth, Minnesota",
    "Detroit, Michigan",         "Lansing, Michigan",        "Cleveland, Ohio",
    "Cincinnati, Ohio",          "Dayton, Ohio",             "Toledo, Ohio",
    "Indianapolis, Indiana",     "Evansville, Indiana",      "Burlington, Vermont",
    "Manchester, New Hampshire", "Bangor, Maine",            "Anchorage, Alaska",
    "Honolulu, Hawaii",          "Fargo, North Dakota",      "Sioux Falls, South Dakota",
};

constexpr const char* kCompanies[] = {
    "Microsoft",              "Oracle",               "Intel",                "Nvidia",
    "Adobe",                  "Salesforce",           "Netflix",              "Cisco",
    "Qualcomm",               "Boeing",               "Lockheed Martin",      "Raytheon",
    "Honeywell",              "Caterpillar",          "Deere",                "Pfizer",
    "Moderna",                "Medtronic",            "Genentech",            "Amgen",
    "Walmart",                "Costco",               "Target",               "Kroger",
    "Nike",                   "Starbucks",            "PepsiCo",              "Mattel",
    "Hasbro",                 "Disney",               "Paramount",            "Comcast",
    "Verizon",                "Delta Air Lines",      "Southwest Airlines",   "FedEx",
    "Chevron",                "ExxonMobil",           "Tesla",                "Ford Motor Company",
    "Goldman Sachs",          "Morgan Stanley",       "Citigroup",            "Visa",
    "Mastercard",             "Deloitte",             "Accenture",            "Nordstrom",
    "Kellogg",                "Hershey",              "Whirlpool",            "Xerox",
    "Yahoo",                  "Zillow",               "Unilever",             "Siemens",
};

}  // namespace

std::span<const char* const> first_name_pool() { return kFirstNames; }
std::span<const char* const> last_name_pool() { return kLastNames; }
std::span<const char* const> college_pool() { return kColleges; }
std::span<const char* const> major_pool() { return kMajors; }
std::span<const char* const> hometown_pool() { return kHometowns; }
std::span<const char* const> company_pool() { return kCompanies; }

}  // namespace plab
