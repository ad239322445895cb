package android.location;

/**
 * Used for receiving notifications when the device location has changed.
 */
public interface LocationListener {
    /**
     * Called when the location has changed.
     *
     * @param location the updated location
     */
    void onLocationChanged(Location location);

    /**
     * Called when the provider this listener is registered with becomes enabled.
     */
    default void onProviderEnabled(String provider) {}
}
