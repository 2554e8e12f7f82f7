/** Payload shapes of the /api endpoints. The client renders these verbatim;
 * it never derives audit numbers of its own. */
export const SET_NAMES = ["EE", "EU", "UE", "UU"];
